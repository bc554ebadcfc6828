"""Transmit-side burst construction: QPSK mapping, unitary IFFT, the
repeated-half timing preamble, cyclic-prefixed data symbols and the burst layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_EB_N0_DB = 10.0


@dataclass(frozen=True)
class OfdmConfig:
    """Scenario parameters. Defaults follow the N=128, 16-symbol AWGN setup.

    At most one of ``eb_over_n0_db`` / ``es_over_n0_db`` may be set; with
    neither set the scenario runs at ``DEFAULT_EB_N0_DB`` Eb/N0.
    """

    fft_size: int = 128
    cp_len: int = 32
    num_data_symbols: int = 16
    lead_noise_len: int = 512
    tail_noise_len: int = 512
    preamble_has_cp: bool = False
    es_over_n0_db: float | None = None
    eb_over_n0_db: float | None = None
    base_seed: int = 0

    def __post_init__(self):
        n = self.fft_size
        if not isinstance(n, (int, np.integer)) or n < 2 or n & (n - 1):
            raise ValueError(f"fft_size must be a power of two >= 2, got {n!r}")
        if not 0 <= self.cp_len < n:
            raise ValueError(f"cp_len must satisfy 0 <= cp_len < fft_size, got {self.cp_len}")
        for name in ("num_data_symbols", "lead_noise_len", "tail_noise_len", "base_seed"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.es_over_n0_db is not None and self.eb_over_n0_db is not None:
            raise ValueError("set only one of es_over_n0_db and eb_over_n0_db")

    @property
    def half_len(self) -> int:
        return self.fft_size // 2

    @property
    def data_symbol_len(self) -> int:
        return self.fft_size + self.cp_len

    @property
    def burst_len(self) -> int:
        """Samples from the first preamble sample to the last data sample."""
        first = self.fft_size + (self.cp_len if self.preamble_has_cp else 0)
        return first + (1 + self.num_data_symbols) * self.data_symbol_len

    @property
    def stream_len(self) -> int:
        return self.lead_noise_len + self.burst_len + self.tail_noise_len

    @property
    def expected_peak_index(self) -> int:
        return (self.lead_noise_len + 2 * self.half_len
                + (self.cp_len if self.preamble_has_cp else 0))


@dataclass(frozen=True)
class TimeDomainSymbol:
    samples: np.ndarray
    has_cp: bool = False

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class BurstDescriptor:
    """A sample stream plus its ground truth.

    ``expected_peak_index`` is in causal indexing: the index at which the
    streaming metric (emitted after consuming samples ``0..n-1``) peaks.
    ``burst_end_index`` is one past the last burst sample.
    """

    stream: np.ndarray
    true_sof_index: int
    expected_peak_index: int
    burst_end_index: int

    def __post_init__(self):
        if not 0 <= self.true_sof_index < len(self.stream):
            raise ValueError("true_sof_index outside the stream")


def seed_sequence(seed) -> np.random.SeedSequence:
    """Accept an int seed or an already spawned SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def qpsk_map(bits) -> np.ndarray:
    """Gray-map bit pairs onto unit-energy QPSK points.

    The first bit of a pair selects the sign of the real part, the second the
    sign of the imaginary part, so ``(0, 0) -> (1+1j)/sqrt(2)``.

    Args:
        bits: flat sequence of 0/1 values, or an array of shape (k, 2).

    Returns:
        complex array of ``len(bits) // 2`` symbols.
    """
    b = np.asarray(bits).reshape(-1)
    if b.size % 2:
        raise ValueError(f"QPSK needs an even number of bits, got {b.size}")
    if b.size and not np.isin(b, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    b = b.astype(np.int8).reshape(-1, 2)
    return ((1 - 2 * b[:, 0]) + 1j * (1 - 2 * b[:, 1])) / np.sqrt(2)


def random_qpsk(rng: np.random.Generator, count: int) -> np.ndarray:
    return qpsk_map(rng.integers(0, 2, size=2 * count))


def _check_len(x: np.ndarray, n: int | None) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a non-empty 1-D sequence")
    if n is not None and x.size != n:
        raise ValueError(f"expected {n} values, got {x.size}")
    return x


def inverse_transform(bins, n: int | None = None) -> np.ndarray:
    """Unitary inverse DFT, s_n = N^-1/2 sum_k X_k exp(+2j pi k n / N)."""
    return np.fft.ifft(_check_len(bins, n), norm="ortho")


def forward_transform(samples, n: int | None = None) -> np.ndarray:
    """Unitary forward DFT, the inverse of :func:`inverse_transform`."""
    return np.fft.fft(_check_len(samples, n), norm="ortho")


def add_cyclic_prefix(body: np.ndarray, cp_len: int) -> np.ndarray:
    if cp_len == 0:
        return body.copy()
    return np.concatenate([body[-cp_len:], body])


def preamble_bins(cfg: OfdmConfig, seed) -> np.ndarray:
    """Frequency-domain preamble: sqrt(2)-scaled PN QPSK on even bins, zeros on odd."""
    rng = np.random.default_rng(seed)
    bins = np.zeros(cfg.fft_size, dtype=complex)
    bins[::2] = np.sqrt(2) * random_qpsk(rng, cfg.half_len)
    return bins


def build_preamble_symbol(cfg: OfdmConfig, seed) -> TimeDomainSymbol:
    """Timing preamble whose two time-domain halves are bit-identical.

    Only even bins are populated, so the N-point inverse DFT reduces to an
    L-point one evaluated twice; computing it that way (then tiling) makes the
    repetition exact instead of exact-up-to-FFT-rounding.
    """
    bins = preamble_bins(cfg, seed)
    half = np.fft.ifft(bins[::2], norm="ortho") / np.sqrt(2)
    body = np.tile(half, 2)
    if cfg.preamble_has_cp:
        return TimeDomainSymbol(add_cyclic_prefix(body, cfg.cp_len), True)
    return TimeDomainSymbol(body, False)


def build_data_symbol(cfg: OfdmConfig, payload) -> TimeDomainSymbol:
    body = inverse_transform(payload, cfg.fft_size)
    return TimeDomainSymbol(add_cyclic_prefix(body, cfg.cp_len), True)


def assemble_burst(cfg: OfdmConfig, seed=None) -> BurstDescriptor:
    """Lay out ``zeros | preamble 1 | preamble 2 | data symbols | zeros``.

    The second preamble symbol is a full-band PN QPSK symbol with CP. The zero
    spans are left noise-free; noise is added later over the whole stream.
    ``seed`` defaults to ``cfg.base_seed``.
    """
    seq = seed_sequence(cfg.base_seed if seed is None else seed)
    pre_seed, second_seed, data_seed = seq.spawn(3)
    parts = [np.zeros(cfg.lead_noise_len, dtype=complex),
             build_preamble_symbol(cfg, pre_seed).samples]
    second = random_qpsk(np.random.default_rng(second_seed), cfg.fft_size)
    parts.append(build_data_symbol(cfg, second).samples)
    rng = np.random.default_rng(data_seed)
    for _ in range(cfg.num_data_symbols):
        parts.append(build_data_symbol(cfg, random_qpsk(rng, cfg.fft_size)).samples)
    parts.append(np.zeros(cfg.tail_noise_len, dtype=complex))
    stream = np.concatenate(parts)
    return BurstDescriptor(
        stream=stream,
        true_sof_index=cfg.lead_noise_len,
        expected_peak_index=cfg.expected_peak_index,
        burst_end_index=cfg.lead_noise_len + cfg.burst_len,
    )
