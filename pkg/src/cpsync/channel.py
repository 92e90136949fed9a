"""Channel impairments: timing offset, multipath convolution, AWGN, CFO rotation.

All impairments are pure, seed-deterministic transforms that return new
SampleStream instances; input buffers are never mutated. SNR is defined per
received sample (Es/N0) against the measured payload power of the stream the
noise is added to, i.e. after any multipath convolution, so runs across
channel types compare at equal receiver SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .txgen import SampleStream

__all__ = [
    "SPEED_OF_LIGHT_MPS",
    "CIR_FIXTURE",
    "CfoParams",
    "ChannelScenario",
    "replicate_branches",
    "apply_sto",
    "apply_cir",
    "random_cir",
    "add_awgn",
    "apply_cfo",
    "doppler_frequency",
]

SPEED_OF_LIGHT_MPS = 299_792_458.0

# Frozen ten-tap multipath snapshot used by the canned Rayleigh scenarios,
# so fading runs are reproducible. Energy sum(|h|^2) ~= 1.1346; the dominant
# tap sits at index 6, which is what drags timing estimates away from the
# transmitted offset in the fading scenarios.
CIR_FIXTURE: tuple[complex, ...] = (
    -0.2338 + 0.1770j,
    0.1573 - 0.0179j,
    0.1352 + 0.1641j,
    -0.1318 - 0.2919j,
    -0.1715 + 0.3104j,
    0.5049 - 0.1209j,
    0.2021 - 0.6263j,
    0.0621 + 0.1324j,
    0.1568 - 0.0362j,
    0.0113 - 0.0004j,
)


@dataclass(frozen=True)
class CfoParams:
    """Carrier frequency offset description.

    epsilon is the normalized offset in cycles per n_subcarriers samples;
    carrier_hz and velocity_mps are kept so a Doppler-derived epsilon can be
    reconstructed from physical parameters.
    """

    epsilon: float
    carrier_hz: float = 1.0e9
    velocity_mps: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.epsilon):
            raise ValueError(f"epsilon must be finite, got {self.epsilon}")
        if not self.carrier_hz > 0:
            raise ValueError(f"carrier_hz must be > 0, got {self.carrier_hz}")
        if self.velocity_mps < 0:
            raise ValueError(f"velocity_mps must be >= 0, got {self.velocity_mps}")


@dataclass(frozen=True)
class ChannelScenario:
    """Full impairment description for one run.

    snr_db may be math.inf, the documented no-noise sentinel. Empty cir_taps
    means an ideal (single unit tap) channel.
    """

    snr_db: float
    cir_taps: tuple[complex, ...] = ()
    sto: int = 0
    cfo: CfoParams | None = None
    rx_branches: int = 1

    def __post_init__(self) -> None:
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")
        if self.rx_branches < 1:
            raise ValueError(f"rx_branches must be >= 1, got {self.rx_branches}")
        if self.cir_taps and not all(
            math.isfinite(t.real) and math.isfinite(t.imag) for t in map(complex, self.cir_taps)
        ):
            raise ValueError("cir_taps must be finite")


def replicate_branches(stream: SampleStream, n_branches: int) -> SampleStream:
    """Broadcast a single-branch stream to n_branches identical branches."""
    if stream.n_branches != 1:
        raise ValueError(f"expected a single-branch stream, got {stream.n_branches}")
    if n_branches < 1:
        raise ValueError(f"n_branches must be >= 1, got {n_branches}")
    return stream.with_branches([stream.branches[0]] * n_branches)


def apply_sto(stream: SampleStream, delta: int) -> SampleStream:
    """Displace the receiver's nominal symbol start by the timing offset delta.

    Positive delta means the symbol actually begins delta samples after the
    receiver's assumed start (the signal is late in the receiver's window),
    which is the convention under which the estimators recover delta itself.
    Sample values are untouched; only sample_origin moves.
    """
    new_origin = stream.sample_origin - delta
    if not 0 <= new_origin < stream.buffer_len:
        raise ValueError(
            f"delta={delta} moves sample_origin to {new_origin}, "
            f"outside buffer [0, {stream.buffer_len})"
        )
    return stream.with_origin(new_origin)


def apply_cir(stream: SampleStream, taps) -> SampleStream:
    """Per-branch linear convolution with the channel impulse response.

    Output is truncated to the input length; the tail transient is absorbed
    by the frame's trailing zero guard, which keeps index bookkeeping exact
    for timing scoring.
    """
    h = np.asarray(taps, dtype=np.complex128).ravel()
    if h.size == 0:
        raise ValueError("cir taps must contain at least one coefficient")
    if not np.all(np.isfinite(h)):
        raise ValueError("cir taps must be finite")
    convolved = [np.convolve(b, h)[: b.size] for b in stream.branches]
    return stream.with_branches(convolved)


def random_cir(n_taps: int, seed: int, normalize: bool = False) -> np.ndarray:
    """Draw i.i.d. complex-Gaussian taps (g_re + j*g_im)/sqrt(2), unit tap variance.

    Tap magnitudes are therefore Rayleigh distributed. With normalize=True
    the taps are rescaled so sum(|h|^2) == 1.
    """
    if n_taps < 1:
        raise ValueError(f"n_taps must be >= 1, got {n_taps}")
    rng = np.random.default_rng(seed)
    taps = (rng.standard_normal(n_taps) + 1j * rng.standard_normal(n_taps)) / np.sqrt(2.0)
    if normalize:
        taps /= np.sqrt(np.sum(np.abs(taps) ** 2))
    return taps


def add_awgn(stream: SampleStream, snr_db: float, seed: int) -> SampleStream:
    """Add circular complex Gaussian noise sized against measured payload power.

    Per-sample noise variance is P_sig / 10^(snr_db/10) with P_sig the mean
    payload power of the input stream. snr_db == +inf disables noise. Noise
    is drawn independently per branch from one seeded generator.
    """
    if math.isnan(snr_db):
        raise ValueError("snr_db must not be NaN")
    if math.isinf(snr_db) and snr_db > 0:
        return stream.with_branches(list(stream.branches))
    p_sig = stream.payload_power()
    if p_sig == 0.0:
        raise ValueError("cannot size noise against a zero-power payload")
    sigma2 = p_sig / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    scale = np.sqrt(sigma2 / 2.0)
    noisy = [
        b + scale * (rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size))
        for b in stream.branches
    ]
    return stream.with_branches(noisy)


def apply_cfo(stream: SampleStream, epsilon: float, n_fft: int) -> SampleStream:
    """Rotate sample m by exp(j*2*pi*epsilon*m/n_fft) on every branch."""
    if not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite, got {epsilon}")
    if n_fft < 1:
        raise ValueError(f"n_fft must be >= 1, got {n_fft}")
    phase = np.exp(2j * np.pi * epsilon * np.arange(stream.buffer_len) / n_fft)
    return stream.with_branches([b * phase for b in stream.branches])


def doppler_frequency(velocity_mps: float, carrier_hz: float) -> float:
    """Doppler shift v*f_c/c for a receiver moving at velocity_mps."""
    if velocity_mps < 0:
        raise ValueError(f"velocity_mps must be >= 0, got {velocity_mps}")
    if not carrier_hz > 0:
        raise ValueError(f"carrier_hz must be > 0, got {carrier_hz}")
    return velocity_mps * carrier_hz / SPEED_OF_LIGHT_MPS
