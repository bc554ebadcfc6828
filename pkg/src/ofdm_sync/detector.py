"""Repeated-half timing metrics.

Non-causal quantities for a stream ``r`` and half length ``L``::

    P(n)      = sum_m conj(r[n+m]) r[n+m+L]
    R(n)      = sum_m |r[n+m+L]|^2           (newer half)
    R(n-L)    = sum_m |r[n+m]|^2             (older half)
    classic   = |P|^2 / R(n)^2
    modified  = |P|^2 / (R(n) R(n-L))        always in [0, 1]
    delayed_r = |P|^2 / R(n-L)^2

with n = 0 .. len(r) - 2L. The causal form emits the value for n at time
n + 2L. Every ratio is 0 where its denominator vanishes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

_TINY = np.finfo(float).tiny


class IndexConvention(enum.Enum):
    NONCAUSAL = "noncausal"
    CAUSAL_2L = "causal"


def _stream(stream, half_len: int) -> np.ndarray:
    if half_len < 1:
        raise ValueError(f"half length must be >= 1, got {half_len}")
    x = np.asarray(stream, dtype=complex)
    if x.ndim == 0 or x.shape[-1] < 2 * half_len:
        raise ValueError(f"stream needs at least {2 * half_len} samples")
    return x


def _window_sum(x: np.ndarray, width: int) -> np.ndarray:
    # direct per-window sums; no running-sum cancellation
    return sliding_window_view(x, width, axis=-1).sum(axis=-1)


def window_energy(stream, half_len: int) -> np.ndarray:
    """Energy of every length-L window, E(k) = sum_m |r[k+m]|^2, k = 0..len-L."""
    x = _stream(stream, half_len)
    return _window_sum(x.real ** 2 + x.imag ** 2, half_len)


def sliding_correlation(stream, half_len: int) -> np.ndarray:
    """P(n) over the last axis; batches of streams are allowed."""
    x = _stream(stream, half_len)
    lagged = np.conj(x[..., :-half_len]) * x[..., half_len:]
    return _window_sum(lagged, half_len)


def sliding_energy(stream, half_len: int) -> np.ndarray:
    """R(n), aligned with :func:`sliding_correlation`."""
    return window_energy(stream, half_len)[..., half_len:]


def lagged_energy(stream, half_len: int) -> np.ndarray:
    """R(n-L): the energy of the older half window, aligned with P(n)."""
    return window_energy(stream, half_len)[..., :-half_len]


def _check_same_shape(*arrays):
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise ValueError(f"inputs must have equal lengths, got shapes {sorted(shapes)}")


def _guarded_ratio(p, den_a, den_b) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    den_a = np.asarray(den_a, dtype=float)
    den_b = np.asarray(den_b, dtype=float)
    _check_same_shape(p, den_a, den_b)
    ok = (den_a > _TINY) & (den_b > _TINY)
    a = np.abs(p)
    out = np.zeros(p.shape)
    # (a/x)(a/y) instead of a^2/(xy): stays in range when xy would underflow
    out[ok] = (a[ok] / den_a[ok]) * (a[ok] / den_b[ok])
    return out


def metric_classic(p, r) -> np.ndarray:
    """|P(n)|^2 / R(n)^2. Not bounded by 1."""
    return _guarded_ratio(p, r, r)


def metric_modified(p, r, r_lag) -> np.ndarray:
    """|P(n)|^2 / (R(n) R(n-L)), bounded by 1 through Cauchy-Schwarz.

    ``r_lag`` holds R(n-L) aligned with ``p``; see :func:`lagged_energy`.
    """
    return _guarded_ratio(p, r, r_lag)


def metric_delayed_r(p, r_lag) -> np.ndarray:
    """|P(n)|^2 / R(n-L)^2, the classic metric with its energy term delayed by L."""
    return _guarded_ratio(p, r_lag, r_lag)


@dataclass(frozen=True)
class MetricTrace:
    p: np.ndarray
    r: np.ndarray
    r_lag: np.ndarray
    m_old: np.ndarray
    m_new: np.ndarray
    m_delayed_r: np.ndarray
    half_len: int
    index_convention: IndexConvention = IndexConvention.NONCAUSAL

    @property
    def offset(self) -> int:
        return 2 * self.half_len if self.index_convention is IndexConvention.CAUSAL_2L else 0

    @property
    def indices(self) -> np.ndarray:
        return np.arange(len(self.p)) + self.offset

    def causal(self) -> "MetricTrace":
        """Same values relabelled so that index n holds the non-causal value at n - 2L."""
        return MetricTrace(self.p, self.r, self.r_lag, self.m_old, self.m_new,
                           self.m_delayed_r, self.half_len, IndexConvention.CAUSAL_2L)

    def at(self, index: int, field: str = "m_new") -> float:
        return float(getattr(self, field)[index - self.offset])


def compute_metrics(stream, half_len: int, causal: bool = False) -> MetricTrace:
    """All three metrics for one stream.

    The stream is first rescaled by a power of two so its peak magnitude is
    near 1. That is exact in floating point, leaves every ratio unchanged and
    keeps energies of large-amplitude inputs from overflowing.
    """
    x = _stream(stream, half_len)
    peak = np.max(np.abs(x)) if x.size else 0.0
    e = -int(np.frexp(peak)[1]) if np.isfinite(peak) and peak > 0 else 0
    x = np.ldexp(x.real, e) + 1j * np.ldexp(x.imag, e)
    p = sliding_correlation(x, half_len)
    energy = window_energy(x, half_len)
    r, r_lag = energy[..., half_len:], energy[..., :-half_len]
    m_old, m_new = metric_classic(p, r), metric_modified(p, r, r_lag)
    m_delayed = metric_delayed_r(p, r_lag)
    # report P and R at the caller's scale
    p = np.ldexp(p.real, -2 * e) + 1j * np.ldexp(p.imag, -2 * e)
    r, r_lag = np.ldexp(r, -2 * e), np.ldexp(r_lag, -2 * e)
    trace = MetricTrace(p, r, r_lag, m_old, m_new, m_delayed, half_len)
    return trace.causal() if causal else trace


_CANCEL = 2.0 ** -16


class StreamingDetector:
    """Causal modified metric with O(1) recursive accumulators.

    Each push adds the newest term to a window sum and subtracts the term that
    left it. Rounding drift is bounded two ways: every accumulator carries a
    running bound on the magnitudes it has absorbed, and is rebuilt from the
    ring buffer when its value falls below ``2**-16`` of that bound; all
    accumulators are also rebuilt every ``refresh_interval`` samples. Windows
    that hold only exact zeros are tracked by count so they read exactly 0.

    Attributes:
        half_len: L.
        samples_seen: samples pushed so far.
        p_acc: sum of conj(older) * newer over the two halves.
        r_new_acc, r_old_acc: energies of the newest L and the L before them.
    """

    def __init__(self, half_len: int, refresh_interval: int = 2 ** 16):
        if half_len < 1:
            raise ValueError(f"half length must be >= 1, got {half_len}")
        if refresh_interval < 1:
            raise ValueError("refresh_interval must be >= 1")
        self.half_len = half_len
        self.refresh_interval = refresh_interval
        self.samples_seen = 0
        self.refreshes = 0
        self._buf = [0j] * (2 * half_len)
        self._pos = 0  # slot of the oldest buffered sample
        self.p_acc = 0j
        self.r_new_acc = 0.0
        self.r_old_acc = 0.0
        self._p_bound = self._new_bound = self._old_bound = 0.0
        self._nz_new = self._nz_old = 0

    def _window(self, start: int) -> list[complex]:
        n2 = len(self._buf)
        return [self._buf[(self._pos + start + m) % n2] for m in range(self.half_len)]

    def _exact_p(self):
        old, new = self._window(0), self._window(self.half_len)
        terms = [a.conjugate() * b for a, b in zip(old, new)]
        self.p_acc = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
        self._p_bound = sum(abs(t) for t in terms)

    def _exact_energy(self, start: int) -> float:
        return math.fsum(x.real * x.real + x.imag * x.imag for x in self._window(start))

    def refresh(self):
        """Recompute all accumulators from the ring buffer."""
        self._exact_p()
        self.r_old_acc = self._old_bound = self._exact_energy(0)
        self.r_new_acc = self._new_bound = self._exact_energy(self.half_len)
        self.refreshes += 1

    def push(self, sample) -> float | None:
        """Consume one sample; return the metric once 2L samples have been seen."""
        x = complex(sample)
        buf, n2, L = self._buf, len(self._buf), self.half_len
        leaving = buf[self._pos]
        mid = buf[(self._pos + L) % n2]
        e_x = x.real * x.real + x.imag * x.imag
        e_mid = mid.real * mid.real + mid.imag * mid.imag
        e_leaving = leaving.real * leaving.real + leaving.imag * leaving.imag
        t_in = mid.conjugate() * x
        t_out = leaving.conjugate() * mid

        self.p_acc += t_in - t_out
        self.r_new_acc += e_x - e_mid
        self.r_old_acc += e_mid - e_leaving
        self._p_bound += abs(t_in) + abs(t_out)
        self._new_bound += e_x + e_mid
        self._old_bound += e_mid + e_leaving
        self._nz_new += (x != 0) - (mid != 0)
        self._nz_old += (mid != 0) - (leaving != 0)

        buf[self._pos] = x
        self._pos = (self._pos + 1) % n2
        self.samples_seen += 1

        if self.samples_seen % self.refresh_interval == 0:
            self.refresh()
        else:
            if self._nz_new == 0:
                self.r_new_acc = self._new_bound = 0.0
            elif self.r_new_acc < _CANCEL * self._new_bound:
                self.r_new_acc = self._new_bound = self._exact_energy(L)
            if self._nz_old == 0:
                self.r_old_acc = self._old_bound = 0.0
            elif self.r_old_acc < _CANCEL * self._old_bound:
                self.r_old_acc = self._old_bound = self._exact_energy(0)
            if self._nz_new == 0 or self._nz_old == 0:
                self.p_acc, self._p_bound = 0j, 0.0
            elif abs(self.p_acc) < _CANCEL * self._p_bound:
                self._exact_p()

        if self.samples_seen < 2 * L:
            return None
        if self.r_old_acc <= _TINY or self.r_new_acc <= _TINY:
            return 0.0
        a = abs(self.p_acc)
        return (a / self.r_old_acc) * (a / self.r_new_acc)

    def push_many(self, samples) -> np.ndarray:
        """Push a block; returns only the values emitted (warm-up values omitted)."""
        out = [self.push(s) for s in np.asarray(samples, dtype=complex).ravel()]
        return np.array([v for v in out if v is not None], dtype=float)


def detector_push(state: StreamingDetector, sample) -> float | None:
    return state.push(sample)


@dataclass(frozen=True)
class PeakReport:
    candidates: list[tuple[int, float]]
    accepted: tuple[int, float] | None
    threshold: float
    search_window: int


def find_peak(metric, threshold: float, window: int, index_offset: int = 0) -> PeakReport:
    """Sliding peak search followed by a threshold test.

    A candidate is a sample at or above ``threshold`` that beats everything
    within ``window`` samples on either side; equal values resolve toward the
    smaller index. The first candidate in stream order is accepted.
    ``index_offset`` is added to reported indices (e.g. 2L for a causal trace).
    """
    v = np.asarray(metric, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("metric must be a non-empty 1-D sequence")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    ok = v >= threshold
    for k in range(1, min(window, v.size - 1) + 1):
        ok[k:] &= v[k:] > v[:-k]      # strictly above earlier neighbours
        ok[:-k] &= v[:-k] >= v[k:]    # not below later neighbours
    idx = np.flatnonzero(ok)
    candidates = [(int(i) + index_offset, float(v[i])) for i in idx]
    return PeakReport(candidates, candidates[0] if candidates else None, threshold, window)
