"""Multipath FIR plus complex AWGN, r_n = sum_m h_m s_{n-d_m} + w_n."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .frame import DEFAULT_EB_N0_DB, BurstDescriptor, OfdmConfig, assemble_burst, seed_sequence


@dataclass(frozen=True)
class ChannelModel:
    """Tapped delay line. ``taps`` holds (delay in samples, complex gain) pairs."""

    taps: tuple[tuple[int, complex], ...]

    def __post_init__(self):
        taps = tuple((int(d), complex(h)) for d, h in self.taps)
        if not taps:
            raise ValueError("a channel needs at least one tap")
        delays = [d for d, _ in taps]
        if delays[0] < 1 or any(b <= a for a, b in zip(delays, delays[1:])):
            raise ValueError(f"tap delays must be positive and strictly increasing, got {delays}")
        object.__setattr__(self, "taps", taps)

    @property
    def duration(self) -> int:
        return self.taps[-1][0]

    @classmethod
    def two_ray(cls, fft_size: int = 128) -> "ChannelModel":
        """Gains 0.8 and 0.5 exp(j pi/4) with the second ray a quarter symbol behind."""
        return cls(((1, 0.8), (1 + fft_size // 4, 0.5 * np.exp(1j * np.pi / 4))))

    @classmethod
    def parse(cls, text: str) -> "ChannelModel":
        """Parse ``"d1:re,im;d2:re,im"``."""
        taps = []
        for item in filter(None, (t.strip() for t in text.split(";"))):
            try:
                delay, gain = item.split(":")
                re, im = gain.split(",")
                taps.append((int(delay), complex(float(re), float(im))))
            except ValueError:
                raise ValueError(f"bad tap {item!r}, expected delay:re,im") from None
        return cls(tuple(taps))

    def format(self) -> str:
        return ";".join(f"{d}:{h.real!r},{h.imag!r}" for d, h in self.taps)


class NoiseConvention(enum.Enum):
    EB_N0_QPSK = "eb_n0"
    ES_N0 = "es_n0"


@dataclass(frozen=True)
class NoiseSpec:
    """SNR in dB under an explicit convention; Es = 1 per sample/subcarrier.

    QPSK carries two bits per symbol, so Eb/N0 converts with Eb = Es/2.
    """

    level_db: float
    convention: NoiseConvention = NoiseConvention.EB_N0_QPSK

    @property
    def sigma_sq(self) -> float:
        if np.isposinf(self.level_db):
            return 0.0
        scale = 0.5 if self.convention is NoiseConvention.EB_N0_QPSK else 1.0
        return scale * 10.0 ** (-self.level_db / 10.0)

    @classmethod
    def noiseless(cls) -> "NoiseSpec":
        return cls(float("inf"), NoiseConvention.ES_N0)

    @classmethod
    def from_config(cls, cfg: OfdmConfig) -> "NoiseSpec":
        if cfg.es_over_n0_db is not None:
            return cls(cfg.es_over_n0_db, NoiseConvention.ES_N0)
        eb = DEFAULT_EB_N0_DB if cfg.eb_over_n0_db is None else cfg.eb_over_n0_db
        return cls(eb, NoiseConvention.EB_N0_QPSK)


def derive_seed(base_seed: int, trial: int) -> int:
    """Independent 64-bit seed for one trial, a pure function of (base_seed, trial)."""
    seq = np.random.SeedSequence(base_seed, spawn_key=(trial,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def apply_multipath(stream, ch: ChannelModel) -> np.ndarray:
    """Convolve with the tap set, truncated to the input length (s_k = 0 for k < 0)."""
    x = np.asarray(stream, dtype=complex)
    out = np.zeros_like(x)
    for delay, gain in ch.taps:
        if delay < len(x):
            out[delay:] += gain * x[: len(x) - delay]
    return out


def add_awgn(stream, noise: NoiseSpec | float, seed) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise.

    ``noise`` is a :class:`NoiseSpec` or a bare total variance per sample.
    """
    sigma_sq = noise.sigma_sq if isinstance(noise, NoiseSpec) else float(noise)
    if sigma_sq < 0:
        raise ValueError(f"noise variance must be >= 0, got {sigma_sq}")
    x = np.asarray(stream, dtype=complex)
    if sigma_sq == 0:
        return x.copy()
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((2, len(x)))
    return x + np.sqrt(sigma_sq / 2) * (w[0] + 1j * w[1])


def synthesize_scenario(cfg: OfdmConfig, ch: ChannelModel | None, noise: NoiseSpec,
                        trial_seed) -> BurstDescriptor:
    """Burst, then optional multipath, then AWGN over the entire stream.

    Ground-truth indices are passed through untouched; multipath moves the
    effective peak later by up to ``ch.duration`` samples.
    """
    burst_seed, noise_seed = seed_sequence(trial_seed).spawn(2)
    burst = assemble_burst(cfg, burst_seed)
    x = burst.stream
    if ch is not None:
        x = apply_multipath(x, ch)
    x = add_awgn(x, noise, noise_seed)
    return replace(burst, stream=x)
