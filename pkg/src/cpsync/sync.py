"""Sliding-window symbol-timing estimators built on cyclic-prefix redundancy.

Every CP-extended symbol repeats its first cp_len samples n_fft samples
later, so a received stream y carries lag-n_fft structure that survives an
unknown integer timing offset. With n the receiver's nominal symbol start,
each candidate offset d scores a cp_len-long block against its lag-n_fft
partner, accumulated over symbols_averaged consecutive symbol periods and
over all receive branches l:

    CBM            value(d) = | sum_{l,s,i} y_l[b+i] * conj(y_l[b+n_fft+i]) |
    DBM_MAGNITUDE  value(d) = sum_{l,s,i} (|y_l[b+i]| - |y_l[b+n_fft+i]|)^2
    DBM_LITERAL    value(d) = sum_{l,s,i} |y_l[b+i] - conj(y_l[b+n_fft+i])|^2

with b = n + s*(n_fft+cp_len) + d and i in [0, cp_len). CBM picks the arg
max, the DBM variants the arg min. DBM_MAGNITUDE is the default difference
form: it is exactly zero at the true offset and depends only on sample
magnitudes, so its decisions are invariant under carrier frequency offset.
DBM_LITERAL (subtracting the conjugate instead of comparing magnitudes) is
kept selectable so its behaviour is observable; it carries neither the
zero-at-true-offset nor the CFO-invariance property.

Ties are broken toward the smallest |d|, then the smaller d.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .txgen import OfdmParams, SampleStream

__all__ = [
    "Method",
    "EstimatorConfig",
    "MetricTrace",
    "cbm_metric",
    "dbm_metric",
    "estimate_sto",
    "default_config",
]


class Method(enum.Enum):
    CBM = "cbm"
    DBM_MAGNITUDE = "dbm-mag"
    DBM_LITERAL = "dbm-lit"

    @property
    def maximizes(self) -> bool:
        return self is Method.CBM


@dataclass(frozen=True)
class EstimatorConfig:
    """Search window and accumulation settings for one estimator run.

    n is the receiver's nominal start of symbol 0 within the buffer; the
    candidate offsets search_min..search_max are relative to it.
    """

    method: Method
    search_min: int
    search_max: int
    n: int
    n_fft: int
    cp_len: int
    symbols_averaged: int = 1

    def __post_init__(self) -> None:
        if not self.search_min <= 0 <= self.search_max:
            raise ValueError(
                f"search range [{self.search_min}, {self.search_max}] must contain 0"
            )
        if self.cp_len < 1:
            raise ValueError(f"cp_len must be >= 1, got {self.cp_len}")
        if self.n_fft < self.cp_len:
            raise ValueError(
                f"n_fft must be >= cp_len, got n_fft={self.n_fft}, cp_len={self.cp_len}"
            )
        if self.symbols_averaged < 1:
            raise ValueError(f"symbols_averaged must be >= 1, got {self.symbols_averaged}")

    @property
    def stride(self) -> int:
        return self.n_fft + self.cp_len

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(self.search_min, self.search_max + 1)


@dataclass
class MetricTrace:
    """Metric values over all candidate offsets plus the argoptimum decision."""

    offsets: np.ndarray
    values: np.ndarray
    argopt: int
    opt_value: float

    def __post_init__(self) -> None:
        self.offsets = np.asarray(self.offsets, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.offsets.ndim != 1 or self.offsets.shape != self.values.shape:
            raise ValueError("offsets and values must be 1-D and of equal length")
        if self.offsets.size == 0:
            raise ValueError("trace must contain at least one candidate")
        if not np.all(np.diff(self.offsets) > 0):
            raise ValueError("offsets must be strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("metric values must be finite and >= 0")
        where = np.nonzero(self.offsets == self.argopt)[0]
        if where.size != 1:
            raise ValueError(f"argopt {self.argopt} is not a candidate offset")
        if self.values[where[0]] != self.opt_value:
            raise ValueError("opt_value does not match values at argopt")


def _window_bounds(cfg: EstimatorConfig) -> tuple[int, int]:
    """Lowest and highest buffer index the full candidate sweep touches."""
    lo = cfg.n + cfg.search_min
    hi = (
        cfg.n
        + (cfg.symbols_averaged - 1) * cfg.stride
        + cfg.search_max
        + cfg.cp_len
        - 1
        + cfg.n_fft
    )
    return lo, hi


def _check_window(stream: SampleStream, cfg: EstimatorConfig) -> None:
    lo, hi = _window_bounds(cfg)
    if lo < 0 or hi >= stream.buffer_len:
        raise ValueError(
            f"estimator window touches [{lo}, {hi}] which exceeds the "
            f"buffer [0, {stream.buffer_len})"
        )


def _check_delta(cfg: EstimatorConfig, delta: int) -> None:
    if not cfg.search_min <= delta <= cfg.search_max:
        raise ValueError(
            f"delta={delta} outside search range [{cfg.search_min}, {cfg.search_max}]"
        )


def cbm_metric(stream: SampleStream, cfg: EstimatorConfig, delta: int) -> float:
    """Correlation statistic at a single candidate offset."""
    _check_delta(cfg, delta)
    _check_window(stream, cfg)
    acc = 0.0 + 0.0j
    for y in stream.branches:
        for s in range(cfg.symbols_averaged):
            b = cfg.n + s * cfg.stride + delta
            lead = y[b : b + cfg.cp_len]
            lag = y[b + cfg.n_fft : b + cfg.n_fft + cfg.cp_len]
            acc += np.sum(lead * np.conj(lag))
    return float(np.abs(acc))


def dbm_metric(stream: SampleStream, cfg: EstimatorConfig, delta: int) -> float:
    """Difference statistic at a single candidate offset.

    Uses cfg.method when it names a DBM variant, else the magnitude form.
    """
    _check_delta(cfg, delta)
    _check_window(stream, cfg)
    literal = cfg.method is Method.DBM_LITERAL
    acc = 0.0
    for y in stream.branches:
        for s in range(cfg.symbols_averaged):
            b = cfg.n + s * cfg.stride + delta
            lead = y[b : b + cfg.cp_len]
            lag = y[b + cfg.n_fft : b + cfg.n_fft + cfg.cp_len]
            if literal:
                acc += float(np.sum(np.abs(lead - np.conj(lag)) ** 2))
            else:
                acc += float(np.sum((np.abs(lead) - np.abs(lag)) ** 2))
    return acc


def _accumulated_pair_series(stream: SampleStream, cfg: EstimatorConfig) -> np.ndarray:
    """Per-index pair statistic summed over branches and symbol periods.

    Index i of the result corresponds to candidate-relative position
    search_min + i; a window sum of cp_len consecutive entries is the metric
    for one candidate.
    """
    span = cfg.search_max - cfg.search_min + cfg.cp_len
    if cfg.method is Method.CBM:
        acc = np.zeros(span, dtype=np.complex128)
    else:
        acc = np.zeros(span, dtype=np.float64)
    for y in stream.branches:
        for s in range(cfg.symbols_averaged):
            b = cfg.n + s * cfg.stride + cfg.search_min
            lead = y[b : b + span]
            lag = y[b + cfg.n_fft : b + cfg.n_fft + span]
            if cfg.method is Method.CBM:
                acc += lead * np.conj(lag)
            elif cfg.method is Method.DBM_LITERAL:
                acc += np.abs(lead - np.conj(lag)) ** 2
            else:
                acc += (np.abs(lead) - np.abs(lag)) ** 2
    return acc


def _argopt(offsets: np.ndarray, values: np.ndarray, maximize: bool) -> tuple[int, float]:
    opt = float(values.max() if maximize else values.min())
    ties = offsets[values == opt]
    pick = min((int(d) for d in ties), key=lambda d: (abs(d), d))
    return pick, opt


def estimate_sto(stream: SampleStream, cfg: EstimatorConfig) -> MetricTrace:
    """Evaluate the configured metric over every candidate offset.

    The sliding evaluation is numerically equivalent to an independent
    per-candidate summation (guarded by tests against a brute-force oracle).
    """
    _check_window(stream, cfg)
    series = _accumulated_pair_series(stream, cfg)
    windows = sliding_window_view(series, cfg.cp_len).sum(axis=1)
    if cfg.method is Method.CBM:
        values = np.abs(windows)
    else:
        values = windows  # sums of squared differences, already >= 0
    offsets = cfg.offsets
    argopt, opt_value = _argopt(offsets, values, cfg.method.maximizes)
    return MetricTrace(offsets=offsets, values=values, argopt=argopt, opt_value=opt_value)


def default_config(
    stream: SampleStream,
    params: OfdmParams,
    method: Method,
    symbols_averaged: int | None = None,
) -> EstimatorConfig:
    """Estimator configuration with the default search range of +-2*cp_len.

    The range is clamped so the full sweep window stays inside the stream's
    buffer; averaging defaults to every symbol in the frame.
    """
    averaged = params.symbols_per_frame if symbols_averaged is None else symbols_averaged
    n = stream.sample_origin
    stride = params.symbol_len
    half = 2 * params.cp_len
    search_min = max(-half, -n)
    search_max = min(
        half,
        stream.buffer_len
        - 1
        - (n + (averaged - 1) * stride + params.cp_len - 1 + params.n_subcarriers),
    )
    if search_min > 0 or search_max < 0:
        raise ValueError(
            f"stream too short for any search window around sample_origin={n}"
        )
    return EstimatorConfig(
        method=method,
        search_min=search_min,
        search_max=search_max,
        n=n,
        n_fft=params.n_subcarriers,
        cp_len=params.cp_len,
        symbols_averaged=averaged,
    )
