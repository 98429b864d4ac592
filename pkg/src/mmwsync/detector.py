"""UE-side frame-timing detection by cross-correlation.

The receiver slides the stored unquantized reference symbol over the
quantized per-antenna sample window, takes the joint (lag, antenna) argmax of
the squared correlation magnitude, and reports the timing estimate.  The
zero-lag frequency-domain correlation of an aligned burst doubles as the
SQNR measurement point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .waveform import OfdmGrid


@dataclass(frozen=True)
class CorrelationProfile:
    """Per-antenna correlation values at every candidate lag."""

    values: np.ndarray  # (m_tot, n_lags) complex
    reference: np.ndarray  # (n,) unquantized stored waveform

    @property
    def n_lags(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class TrialOutcome:
    """Detector output for one synchronization attempt."""

    nu_hat: int
    b_hat: int
    peak_power: float
    nu_true: int | None = None
    success: bool | None = None
    zero_lag_sqnr_sample: float | None = None


def correlate(received: np.ndarray, reference: np.ndarray) -> CorrelationProfile:
    """Sliding inner products sum_n received[b, n+nu] * conj(reference[n]).

    ``received`` is (m_tot, window) or a single-antenna (window,) vector with
    window >= len(reference); lags run 0 .. window - n.
    """
    received = np.atleast_2d(np.asarray(received))
    reference = np.asarray(reference)
    n = reference.shape[0]
    window = received.shape[1]
    if window < n:
        raise ValueError(f"received window {window} shorter than reference {n}")
    nfft = 1 << int(np.ceil(np.log2(window + n)))
    f_ref = np.conj(np.fft.fft(reference, nfft))
    corr = np.fft.ifft(np.fft.fft(received, nfft, axis=1) * f_ref[None, :], axis=1)
    return CorrelationProfile(values=corr[:, : window - n + 1], reference=reference)


def detect(profile: CorrelationProfile, nu_true: int | None = None) -> TrialOutcome:
    """Joint argmax of |correlation|^2 over lag and antenna.

    Ties break to the smallest lag, then the smallest antenna index.
    """
    power = np.abs(profile.values) ** 2
    if power.size == 0:
        raise ValueError("empty correlation profile")
    # lag-major flattening makes the first argmax the smallest (lag, antenna)
    flat = int(np.argmax(power.T))
    nu_hat, b_hat = np.unravel_index(flat, power.T.shape)
    return TrialOutcome(
        nu_hat=int(nu_hat),
        b_hat=int(b_hat),
        peak_power=float(power[b_hat, nu_hat]),
        nu_true=nu_true,
        success=None if nu_true is None else bool(nu_hat == nu_true),
    )


def zero_lag_freq_correlation(received_burst: np.ndarray, reference_grid: OfdmGrid) -> complex:
    """Unitary DFT of the aligned burst correlated against the grid.

    Equals the time-domain correlation at the true lag; used for SQNR
    analysis rather than detection.
    """
    burst = np.asarray(received_burst)
    n = reference_grid.n_subcarriers
    if burst.shape[-1] != n:
        raise ValueError(f"burst length {burst.shape[-1]} != grid size {n}")
    spectrum = np.fft.fft(burst) / np.sqrt(n)
    return complex(np.sum(spectrum * np.conj(reference_grid.symbols)))


def timing_nmse(outcomes, true_t: int | None = None) -> float:
    """Mean of |(kappa_true - kappa_est) / kappa_true|^2 over the outcomes.

    ``true_t`` overrides the per-outcome stored truth; either way the truth
    must be nonzero for the ratio to exist.
    """
    errors = []
    for out in outcomes:
        t = true_t if true_t is not None else out.nu_true
        if t is None:
            raise ValueError("outcome carries no true timing and none was given")
        if t == 0:
            raise ValueError("timing NMSE undefined for true position 0")
        errors.append(abs((t - out.nu_hat) / t) ** 2)
    if not errors:
        raise ValueError("no outcomes")
    return float(np.mean(errors))
