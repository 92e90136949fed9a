"""Scenario grid, seeded trials and Monte Carlo statistics for the estimators.

A trial runs the full pipeline

    build_frame -> [replicate branches] -> [apply_cir] -> apply_sto
                -> [apply_cfo] -> add_awgn -> estimate_sto per method

with every random stage seeded from one trial seed through a frozen
splitting rule, so results are reproducible across runs and platforms.

Seed splitting: sub-seeds are blake2b-8 digests over the tagged parts, e.g.
trial seed = derive_seed(master_seed, scenario_label, trial_index) and stage
seeds = derive_seed(trial_seed, "tx" | "awgn" | "cir"). Python's built-in
hash() is salted per process and is deliberately not used.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    CIR_FIXTURE,
    ChannelScenario,
    add_awgn,
    apply_cfo,
    apply_cir,
    apply_sto,
    random_cir,
    replicate_branches,
)
from .spectral import dft
from .sync import Method, MetricTrace, default_config, estimate_sto
from .txgen import OfdmParams, build_frame

__all__ = [
    "ALL_METHODS",
    "Scenario",
    "TrialResult",
    "MethodStats",
    "ScenarioStats",
    "derive_seed",
    "reference_scenarios",
    "run_trial",
    "run_monte_carlo",
    "freq_response",
]

ALL_METHODS: tuple[Method, ...] = (Method.CBM, Method.DBM_MAGNITUDE, Method.DBM_LITERAL)

DEFAULT_STO_VALUES: tuple[int, ...] = (3, -3, 2, -2)


def derive_seed(*parts: int | str) -> int:
    """Deterministic 64-bit seed from tagged integer/string parts."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        if isinstance(part, (int, np.integer)):
            h.update(b"i")
            h.update(int(part).to_bytes(16, "little", signed=True))
        elif isinstance(part, str):
            h.update(b"s")
            h.update(part.encode("utf-8"))
        else:
            raise TypeError(f"seed parts must be int or str, got {type(part).__name__}")
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class Scenario:
    """One cell of the experiment grid.

    fresh_cir_per_trial draws a new normalized Rayleigh CIR for every trial
    (seeded); otherwise channel.cir_taps (possibly empty = AWGN-only) is used
    throughout.
    """

    label: str
    ofdm: OfdmParams
    channel: ChannelScenario
    methods: tuple[Method, ...] = ALL_METHODS
    sto_values: tuple[int, ...] = DEFAULT_STO_VALUES
    fresh_cir_per_trial: bool = False
    n_random_taps: int = 10

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("scenario label must be non-empty")
        if not self.methods:
            raise ValueError("scenario needs at least one method")
        if not self.sto_values:
            raise ValueError("scenario needs at least one true offset")
        limit = 2 * self.ofdm.cp_len
        for sto in self.sto_values:
            if abs(sto) > limit or abs(sto) >= self.ofdm.n_subcarriers:
                raise ValueError(
                    f"sto={sto} outside the default search range +-{limit} "
                    f"(n_subcarriers={self.ofdm.n_subcarriers})"
                )
        if self.fresh_cir_per_trial and self.channel.cir_taps:
            raise ValueError("fresh_cir_per_trial excludes fixed cir_taps")
        if self.fresh_cir_per_trial and self.n_random_taps < 1:
            raise ValueError(f"n_random_taps must be >= 1, got {self.n_random_taps}")

    @property
    def channel_mode(self) -> str:
        if self.fresh_cir_per_trial:
            return "rayleigh-random"
        if not self.channel.cir_taps:
            return "awgn"
        if tuple(self.channel.cir_taps) == CIR_FIXTURE:
            return "rayleigh-fixture"
        return "cir"


@dataclass
class TrialResult:
    """Per-method decisions and full traces for one seeded trial."""

    true_sto: int
    estimates: dict[Method, int]
    traces: dict[Method, MetricTrace]
    seed: int

    def __post_init__(self) -> None:
        if set(self.estimates) != set(self.traces):
            raise ValueError("estimates and traces must cover the same methods")
        for method, trace in self.traces.items():
            if self.estimates[method] != trace.argopt:
                raise ValueError(
                    f"estimate for {method.value} does not equal its trace argopt"
                )


@dataclass
class MethodStats:
    """Error statistics for one method over a batch of trials."""

    exact_hit_rate: float
    within_1_rate: float
    mean_abs_error: float
    mean_sq_error: float
    error_histogram: dict[int, int]

    @classmethod
    def from_errors(cls, errors: np.ndarray) -> "MethodStats":
        errors = np.asarray(errors, dtype=np.int64)
        abs_err = np.abs(errors)
        uniques, counts = np.unique(errors, return_counts=True)
        return cls(
            exact_hit_rate=float(np.mean(errors == 0)),
            within_1_rate=float(np.mean(abs_err <= 1)),
            mean_abs_error=float(np.mean(abs_err)),
            mean_sq_error=float(np.mean(abs_err.astype(np.float64) ** 2)),
            error_histogram={int(u): int(c) for u, c in zip(uniques, counts)},
        )


@dataclass
class ScenarioStats:
    """Aggregated Monte Carlo statistics for one scenario."""

    label: str
    n_trials: int
    methods: dict[Method, MethodStats] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for method, stats in self.methods.items():
            if not 0.0 <= stats.exact_hit_rate <= stats.within_1_rate <= 1.0:
                raise ValueError(f"rate ordering violated for {method.value}")
            if sum(stats.error_histogram.values()) != self.n_trials:
                raise ValueError(f"histogram mass != n_trials for {method.value}")


def reference_scenarios(
    methods: tuple[Method, ...] = ALL_METHODS,
    sto_values: tuple[int, ...] = DEFAULT_STO_VALUES,
) -> list[Scenario]:
    """The canned 8-cell grid: {10, 2} dB x {CP 32, 16} x {AWGN, fixture CIR}."""
    scenarios = []
    for snr_db in (10.0, 2.0):
        for cp_len in (32, 16):
            for taps in ((), CIR_FIXTURE):
                mode = "rayleigh" if taps else "awgn"
                scenarios.append(
                    Scenario(
                        label=f"snr{snr_db:g}_cp{cp_len}_{mode}",
                        ofdm=OfdmParams(n_subcarriers=128, cp_len=cp_len),
                        channel=ChannelScenario(snr_db=snr_db, cir_taps=taps),
                        methods=methods,
                        sto_values=sto_values,
                    )
                )
    return scenarios


def run_trial(scenario: Scenario, true_sto: int, seed: int) -> TrialResult:
    """Execute the full pipeline once, deterministically for the given seed."""
    ofdm = scenario.ofdm
    if abs(true_sto) > 2 * ofdm.cp_len or abs(true_sto) >= ofdm.n_subcarriers:
        raise ValueError(
            f"true_sto={true_sto} outside the default search range "
            f"+-{2 * ofdm.cp_len}"
        )
    stream = build_frame(ofdm, derive_seed(seed, "tx"))
    if scenario.channel.rx_branches > 1:
        stream = replicate_branches(stream, scenario.channel.rx_branches)
    taps = scenario.channel.cir_taps
    if scenario.fresh_cir_per_trial:
        taps = random_cir(scenario.n_random_taps, derive_seed(seed, "cir"), normalize=True)
    if len(taps):
        stream = apply_cir(stream, taps)
    stream = apply_sto(stream, true_sto)
    stream = add_awgn(stream, scenario.channel.snr_db, derive_seed(seed, "awgn"))
    if scenario.channel.cfo is not None:
        # Receiver-mixer model: the rotation hits signal and noise alike, so
        # magnitude-based decisions match the CFO-free run exactly.
        stream = apply_cfo(stream, scenario.channel.cfo.epsilon, ofdm.n_subcarriers)
    traces = {m: estimate_sto(stream, default_config(stream, ofdm, m)) for m in scenario.methods}
    estimates = {m: t.argopt for m, t in traces.items()}
    return TrialResult(true_sto=true_sto, estimates=estimates, traces=traces, seed=seed)


def run_monte_carlo(scenario: Scenario, n_trials: int, master_seed: int) -> ScenarioStats:
    """Aggregate run_trial over n_trials derived seeds, cycling the offset set."""
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    errors: dict[Method, list[int]] = {m: [] for m in scenario.methods}
    for index in range(n_trials):
        true_sto = scenario.sto_values[index % len(scenario.sto_values)]
        result = run_trial(scenario, true_sto, derive_seed(master_seed, scenario.label, index))
        for method, estimate in result.estimates.items():
            errors[method].append(estimate - true_sto)
    return ScenarioStats(
        label=scenario.label,
        n_trials=n_trials,
        methods={m: MethodStats.from_errors(np.array(e)) for m, e in errors.items()},
    )


def freq_response(taps, n_points: int) -> list[tuple[int, float, float]]:
    """Frequency response of a tap vector on an n_points-bin grid.

    Returns (bin index, magnitude in dB, phase in radians) per bin, phase
    wrapped to (-pi, pi]. Bins with exactly zero response report -inf dB.
    """
    h = np.asarray(taps, dtype=np.complex128).ravel()
    if h.size == 0:
        raise ValueError("taps must contain at least one coefficient")
    if n_points < h.size:
        raise ValueError(f"n_points={n_points} smaller than tap count {h.size}")
    padded = np.zeros(n_points, dtype=np.complex128)
    padded[: h.size] = h
    response = dft(padded)
    with np.errstate(divide="ignore"):
        magnitude_db = 20.0 * np.log10(np.abs(response))
    phase = np.angle(response)
    phase[phase == -np.pi] = np.pi
    return [(int(k), float(magnitude_db[k]), float(phase[k])) for k in range(n_points)]
