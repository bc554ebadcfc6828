"""``key = value`` run configuration with command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .channel import ChannelModel, NoiseSpec
from .experiments import DEFAULT_THRESHOLD
from .frame import OfdmConfig


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _uint(text) -> int:
    v = int(text)
    if v < 0:
        raise ValueError(f"expected a non-negative integer, got {text!r}")
    return v


# config key -> (parser, OfdmConfig field or None)
KEYS = {
    "fft_size": (int, "fft_size"),
    "cp_len": (_uint, "cp_len"),
    "num_data_symbols": (_uint, "num_data_symbols"),
    "lead_noise_len": (_uint, "lead_noise_len"),
    "tail_noise_len": (_uint, "tail_noise_len"),
    "preamble_has_cp": (_bool, "preamble_has_cp"),
    "eb_n0_db": (float, "eb_over_n0_db"),
    "es_n0_db": (float, "es_over_n0_db"),
    "seed": (_uint, "base_seed"),
    "taps": (ChannelModel.parse, None),
    "trials": (int, None),
    "threshold": (float, None),
    "bins": (int, None),
    "output_dir": (Path, None),
    "emit_plot_script": (_bool, None),
}
SUBCOMMANDS = ("trace", "histogram", "selftest")


@dataclass
class RunConfig:
    subcommand: str
    ofdm: OfdmConfig
    channel: ChannelModel | None = None
    trials: int = 2000
    threshold: float = DEFAULT_THRESHOLD
    bins: int = 64
    output_dir: Path = Path("out")
    emit_plot_script: bool = True
    config_path: Path | None = None

    @property
    def noise(self) -> NoiseSpec:
        return NoiseSpec.from_config(self.ofdm)

    def to_text(self) -> str:
        """Resolved settings in the same format :func:`parse_config` reads."""
        o = self.ofdm
        values = {
            "fft_size": o.fft_size, "cp_len": o.cp_len,
            "num_data_symbols": o.num_data_symbols,
            "lead_noise_len": o.lead_noise_len, "tail_noise_len": o.tail_noise_len,
            "preamble_has_cp": str(o.preamble_has_cp).lower(),
            "seed": o.base_seed,
        }
        if o.es_over_n0_db is not None:
            values["es_n0_db"] = repr(o.es_over_n0_db)
        else:
            values["eb_n0_db"] = repr(self.noise.level_db)
        if self.channel is not None:
            values["taps"] = self.channel.format()
        values.update(trials=self.trials, threshold=repr(self.threshold), bins=self.bins)
        return "".join(f"{k} = {v}\n" for k, v in values.items())


def read_config_text(text: str) -> dict[str, tuple[object, int]]:
    """Parse file contents into ``{key: (value, line_number)}``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = (KEYS[key][0](value), lineno)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return out


def parse_config(text: str | None = None, flags: dict | None = None,
                 subcommand: str = "trace", config_path=None) -> RunConfig:
    """Resolve defaults < file values < flag overrides.

    ``flags`` maps config keys to values; ``None`` entries are ignored. The
    SNR is a single setting: an SNR flag of either convention replaces any
    SNR given in the file.
    """
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    file_values = read_config_text(text or "")
    lines = {k: ln for k, (_, ln) in file_values.items()}
    values = {k: v for k, (v, _) in file_values.items()}
    if "eb_n0_db" in values and "es_n0_db" in values:
        raise ConfigError(f"line {lines['es_n0_db']}: eb_n0_db and es_n0_db are mutually exclusive")

    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    for key in flags:
        if key not in KEYS:
            raise ConfigError(f"unknown option {key!r}")
    if "eb_n0_db" in flags and "es_n0_db" in flags:
        raise ConfigError("--eb-n0-db and --es-n0-db are mutually exclusive")
    if {"eb_n0_db", "es_n0_db"} & flags.keys():
        values.pop("eb_n0_db", None)
        values.pop("es_n0_db", None)
    for key, value in flags.items():
        try:
            values[key] = KEYS[key][0](value) if isinstance(value, str) else value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None

    def where(key):
        return f"line {lines[key]}: " if key in lines and key not in flags else ""

    ofdm_kwargs = {KEYS[k][1]: v for k, v in values.items() if KEYS[k][1]}
    try:
        ofdm = OfdmConfig(**ofdm_kwargs)
    except ValueError as exc:
        field = next((k for k, (_, f) in KEYS.items() if f and str(exc).startswith(f)), None)
        prefix = where(field) if field else ""
        raise ConfigError(f"{prefix}{exc}") from None

    run = RunConfig(subcommand, ofdm, config_path=Path(config_path) if config_path else None)
    for key in ("trials", "threshold", "bins", "output_dir", "emit_plot_script"):
        if key in values:
            setattr(run, key, values[key])
    run.channel = values.get("taps")
    if run.trials < 1:
        raise ConfigError(f"{where('trials')}trials must be >= 1, got {run.trials}")
    if run.bins < 1:
        raise ConfigError(f"{where('bins')}bins must be >= 1, got {run.bins}")
    if not 0.0 <= run.threshold <= 1.0:
        raise ConfigError(f"{where('threshold')}threshold must lie in [0, 1], got {run.threshold}")
    return run

