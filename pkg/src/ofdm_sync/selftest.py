"""Fast in-process property checks behind ``ofdm-sync selftest``."""

from __future__ import annotations

import numpy as np

from .channel import NoiseSpec, synthesize_scenario
from .detector import StreamingDetector, compute_metrics
from .frame import OfdmConfig

BOUND = 1.0 + 1e-9


def transition_streams(rng: np.random.Generator, count: int, half_len: int,
                       length: int | None = None) -> np.ndarray:
    """Random streams cycling through noise-only, signal-only, onset, offset
    and repeated-half shapes.

    Signal is complex Gaussian with a random per-stream gain; "onset" and
    "offset" switch between near-silence and signal at a random sample. The
    repeated-half streams have period L, scaled by a random complex factor,
    so they sit on the equality case of the bound.
    """
    length = 4 * half_len if length is None else length
    shape = (count, length)
    x = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    gain = 10.0 ** rng.uniform(-3, 3, size=(count, 1))
    kind = np.arange(count) % 5
    cut = rng.integers(1, length, size=count)
    pos = np.arange(length)
    quiet = 10.0 ** rng.uniform(-8, -2, size=(count, 1))
    level = np.ones(shape)
    level[kind == 0] = quiet[kind == 0]                      # noise only
    onset = (kind == 2)[:, None] & (pos < cut[:, None])
    offset = (kind == 3)[:, None] & (pos >= cut[:, None])
    level[onset | offset] = np.broadcast_to(quiet, shape)[onset | offset]
    # exact silence for a quarter of the transition streams
    silent = (rng.random(count) < 0.25)[:, None] & (onset | offset)
    level[silent] = 0.0
    x = gain * level * x
    rep = kind == 4
    factor = rng.standard_normal(rep.sum()) + 1j * rng.standard_normal(rep.sum())
    x[rep, half_len:2 * half_len] = factor[:, None] * x[rep, :half_len]
    return x


def check_boundedness(streams: int = 20000, half_len: int = 8, seed: int = 1) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    x = transition_streams(rng, streams, half_len)
    worst_hi, worst_lo = 0.0, 0.0
    for chunk in np.array_split(x, max(1, streams // 5000)):
        # each row is its own stream; compute_metrics scales the chunk as a whole,
        # which leaves every per-row ratio unchanged
        m = compute_metrics(chunk, half_len).m_new
        worst_hi, worst_lo = max(worst_hi, m.max()), min(worst_lo, m.min())
    ok = bool(worst_lo >= 0.0 and worst_hi <= BOUND)
    return ok, f"{streams} streams, max modified metric {worst_hi:.15f}"


def check_stream_equivalence(length: int = 20000, half_len: int = 64,
                             refresh_interval: int = 4096, seed: int = 2) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(length) + 1j * rng.standard_normal(length)
    x[length // 4: length // 4 + 3 * half_len] = 0
    x[length // 2: length // 2 + half_len] *= 1e-6
    det = StreamingDetector(half_len, refresh_interval)
    streamed = det.push_many(x)
    batch = compute_metrics(x, half_len).m_new
    if streamed.shape != batch.shape:
        return False, f"length mismatch {streamed.shape} vs {batch.shape}"
    nz = batch != 0
    rel = np.max(np.abs(streamed[nz] - batch[nz]) / batch[nz]) if nz.any() else 0.0
    exact_zero = bool(np.all(streamed[~nz] == 0))
    return bool(rel <= 1e-9 and exact_zero), f"max relative error {rel:.3e} over {length} samples"


def check_noiseless_attainment(cfg: OfdmConfig | None = None) -> tuple[bool, str]:
    cfg = OfdmConfig() if cfg is None else cfg
    burst = synthesize_scenario(cfg, None, NoiseSpec.noiseless(), cfg.base_seed)
    trace = compute_metrics(burst.stream, cfg.half_len, causal=True)
    top = int(np.argmax(trace.m_new)) + trace.offset
    peak = trace.at(burst.expected_peak_index)
    ok = top == burst.expected_peak_index and abs(peak - 1.0) <= 1e-12
    return ok, f"peak {peak!r} at {top}, expected {burst.expected_peak_index}"


def check_classic_unbounded() -> tuple[bool, str]:
    m = compute_metrics([2, 2, 1, 1], 2).m_old[0]
    return bool(m == 4.0), f"classic metric on [2, 2, 1, 1] = {m}"


CHECKS = {
    "boundedness": check_boundedness,
    "batch_stream_equivalence": check_stream_equivalence,
    "noiseless_attainment": check_noiseless_attainment,
    "classic_unbounded": check_classic_unbounded,
}


def run_all() -> list[tuple[str, bool, str]]:
    return [(name, *check()) for name, check in CHECKS.items()]
