"""Classical and quantum Fisher information for coupling-rate estimation.

The information in the outgoing light splits into a classical part (the
vacuum/photon outcome) and a quantum part (the surviving distorted
wavepacket).  Finite-time values are assembled from time-domain inner
products of the scattering amplitudes; asymptotic values from
frequency-domain quadratures over the pulse spectral density; and two
families of analytic transcriptions serve as cross-checking oracles.

All reported values are dimensionless (coupling-squared times the raw
Fisher information).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModel, NodeMismatch, Underflow, VacuumOnly
from .dynamics import SystemParams, Trajectory, excited_amplitude, loss_probability
from .numerics import (
    Grid,
    cumulative_trapezoid,
    inner_product,
    integrate_adaptive,
    integrate_real_line,
    scaled_erfc,
)
from .pulses import PulseSpec, SampledPulse, SpectralDensity, spectral_density

__all__ = [
    "FisherBreakdown",
    "FisherCurve",
    "OverlapReport",
    "classical_fi",
    "pure_qfi",
    "finite_time_curve",
    "finite_time_qfi",
    "asymptotic_qfi",
    "gaussian_closed_forms",
    "exponential_linear_closed_forms",
    "spectral_overlap",
]

P_FLOOR = 1e-14
DP_FLOOR = 1e-12


@dataclass(frozen=True)
class FisherBreakdown:
    """Dimensionless classical and quantum information plus their sum."""

    classical: float
    quantum: float
    total: float
    p_loss: float


@dataclass(frozen=True)
class OverlapReport:
    """State/derivative overlap of the normalized outgoing photon."""

    overlap: complex
    symmetric: bool


@dataclass(frozen=True)
class FisherCurve:
    """Finite-time information contributions over detection time."""

    grid: Grid
    classical: np.ndarray
    quantum: np.ndarray
    total: np.ndarray
    p_loss: np.ndarray

    def at(self, t_detect: float) -> FisherBreakdown:
        i = self.grid.index_of(t_detect)
        return FisherBreakdown(float(self.classical[i]), float(self.quantum[i]),
                               float(self.total[i]), float(self.p_loss[i]))


def classical_fi(p: float, dp: float) -> float:
    """Fisher information (dp)^2 / (p (1-p)) of the two-outcome loss model.

    Returns 0 when the probability and its derivative both vanish at
    machine scale (the physical limit along the family); raises
    DegenerateModel for a boundary probability with surviving derivative.
    """
    boundary = p < P_FLOOR or 1.0 - p < P_FLOOR
    if boundary:
        if abs(dp) < DP_FLOOR:
            return 0.0
        raise DegenerateModel(f"p={p} at boundary with dp={dp}")
    return dp * dp / (p * (1.0 - p))


def _classical_curve(p: np.ndarray, dp: np.ndarray) -> np.ndarray:
    denom = p * (1.0 - p)
    safe = denom > P_FLOOR
    out = np.zeros_like(p)
    out[safe] = dp[safe] ** 2 / denom[safe]
    return out


def pure_qfi(state: np.ndarray, d_state: np.ndarray, weight: float,
             jump_state: complex = 0.0) -> float:
    """Quantum contribution of an unnormalized single-photon amplitude.

    state and d_state sample the unnormalized wavepacket and its coupling
    derivative; weight is the grid spacing of the trapezoidal inner
    product.  Returns 4<d|d> - 4|<s|d>|^2 / <s|s>, i.e. the pure-state
    information of the normalized photon rescaled by its survival
    probability.

    Raises:
        VacuumOnly: if the squared norm of the state is below 1e-12.
    """
    nn = inner_product(state, state, weight, jump_state, jump_state).real
    if nn < 1e-12:
        raise VacuumOnly(f"surviving weight {nn} below 1e-12")
    dd = inner_product(d_state, d_state, weight).real
    sd = inner_product(state, d_state, weight)
    return 4.0 * dd - 4.0 * abs(sd) ** 2 / nn


def finite_time_curve(pulse: SampledPulse, params: SystemParams,
                      excited: Trajectory = None) -> FisherCurve:
    """Classical/quantum information versus detection time, on the pulse grid.

    The double time integrals reduce to running trapezoids of fixed
    integrands, so the whole curve costs O(n) after the amplitude solve.
    """
    if excited is None:
        excited = excited_amplitude(pulse, params)
    g = params.coupling
    sg = math.sqrt(g)
    dt = pulse.grid.dt
    loss = loss_probability(pulse, params, excited)
    deriv = excited.value / (2.0 * sg) + sg * excited.d_value
    scattered = pulse.values + sg * excited.value
    dd = cumulative_trapezoid(np.abs(deriv) ** 2, dt).real
    sd = cumulative_trapezoid(np.conj(scattered) * deriv, dt)
    one_minus_p = np.clip(1.0 - loss.p, 1e-15, None)
    quantum = 4.0 * dd - 4.0 * np.abs(sd) ** 2 / one_minus_p
    classical = _classical_curve(loss.p, loss.dp)
    scale = g * g
    return FisherCurve(pulse.grid, scale * classical, scale * quantum,
                       scale * (classical + quantum), loss.p)


def finite_time_qfi(pulse: SampledPulse, params: SystemParams,
                    t_detect: float) -> FisherBreakdown:
    """Information breakdown at one detection time (a node of the pulse grid)."""
    curve = finite_time_curve(pulse, params)
    try:
        return curve.at(t_detect)
    except ValueError as exc:
        raise NodeMismatch(str(exc)) from None


def _resolve_density(pulse_spectrum, params=None) -> SpectralDensity:
    if isinstance(pulse_spectrum, SpectralDensity):
        return pulse_spectrum
    if isinstance(pulse_spectrum, PulseSpec):
        return spectral_density(pulse_spectrum)
    raise TypeError(f"expected SpectralDensity or PulseSpec, got {type(pulse_spectrum)!r}")


def _line_integral(fn, density: SpectralDensity, params: SystemParams, rel_tol: float) -> complex:
    """Integrate fn(omega) * density(omega) over the line, honoring support hints."""
    def integrand(w):
        return fn(np.asarray(w, dtype=float)) * density(w)

    if not density.closed_form:
        # splined numeric densities carry ~1e-7 relative error of their own;
        # demanding more from the quadrature only burns panels
        rel_tol = max(rel_tol, 1e-7)
    if density.support is None:
        scale = max(density.scale, 0.5 * (1.0 + params.gamma) * params.coupling)
        return integrate_real_line(integrand, center=density.center, scale=scale, rel_tol=rel_tol)
    lo, hi = density.support
    cuts = sorted({lo, hi, *(x for x in (density.center, params.detuning) if lo < x < hi)})
    return sum(integrate_adaptive(integrand, a, b, rel_tol=rel_tol)
               for a, b in zip(cuts[:-1], cuts[1:]))


def asymptotic_qfi(pulse_spectrum, params: SystemParams,
                   rel_tol: float = 1e-10) -> FisherBreakdown:
    """Late-time information breakdown from the pulse spectral density.

    pulse_spectrum may be a SpectralDensity or a PulseSpec (in which case
    its density is constructed on the fly).  The vacuum probability, its
    derivative, and the two quantum inner products are each a single
    frequency quadrature against |xi~(omega)|^2.
    """
    density = _resolve_density(pulse_spectrum)
    g = params.coupling
    sg = math.sqrt(g)
    gp = params.gamma_perp

    def f_of(w):
        return sg / (0.5 * (g + gp) - 1j * (np.asarray(w, dtype=float) - params.detuning))

    if gp > 0.0:
        p = gp * _line_integral(lambda w: np.abs(f_of(w)) ** 2, density, params, rel_tol).real
        dp = gp * _line_integral(
            lambda w: np.abs(f_of(w)) ** 2 * (1.0 / g - f_of(w).real / sg),
            density, params, rel_tol).real
        classical = classical_fi(p, dp)
    else:
        p, dp, classical = 0.0, 0.0, 0.0
    dd = _line_integral(lambda w: np.abs(f_of(w) * (2.0 - sg * f_of(w))) ** 2 / (4.0 * g),
                        density, params, rel_tol).real
    sd = _line_integral(
        lambda w: -(1.0 - sg * np.conj(f_of(w))) * f_of(w) * (2.0 - sg * f_of(w)) / (2.0 * sg),
        density, params, rel_tol)
    quantum = 4.0 * dd - 4.0 * abs(sd) ** 2 / (1.0 - p)
    scale = g * g
    return FisherBreakdown(scale * classical, scale * quantum,
                           scale * (classical + quantum), p)


def gaussian_closed_forms(gamma: float, sigma_omega: float) -> FisherBreakdown:
    """Analytic asymptotic breakdown for a real Gaussian pulse of bandwidth sigma_omega.

    Written entirely in terms of the scaled complementary error function so
    the narrowband regime does not overflow.  A quadratically chirped
    Gaussian is covered by passing its enlarged bandwidth.

    Raises:
        Underflow: for sigma_omega below 1e-3, where the expression loses
            all significant digits in double precision.
    """
    if sigma_omega < 1e-3:
        raise Underflow(f"sigma_omega={sigma_omega} below the 1e-3 evaluation floor")
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    s = sigma_omega
    s2pi = math.sqrt(2.0 * math.pi)
    E = scaled_erfc((gamma + 1.0) / (2.0 * math.sqrt(2.0) * s))
    p = s2pi * gamma * E / ((gamma + 1.0) * s)
    n1 = s2pi * (4.0 * gamma * s**2 + (gamma + 1.0) ** 2) * E - 4.0 * (gamma + 1.0) * s
    survivor = (gamma + 1.0) * s - s2pi * gamma * E  # (gamma+1)*s*(1-p)
    if gamma == 0.0:
        classical = 0.0
    else:
        classical = gamma * n1**2 / (16.0 * s2pi * (gamma + 1.0) ** 2 * s**4 * E * survivor)
    n2 = (s2pi * (4.0 * (2.0 * gamma * (gamma + 1.0) + 1.0) * s**2
                  + (2.0 * gamma + 1.0) * (gamma + 1.0) ** 2) * E
          - 4.0 * (gamma + 1.0) * (2.0 * gamma + 1.0) * s)
    quantum = (-(gamma**2) * n1**2 / survivor + 8.0 * s**2 * n2) / (16.0 * (gamma + 1.0) ** 3 * s**5)
    return FisherBreakdown(classical, quantum, classical + quantum, p)


def exponential_linear_closed_forms(gamma: float, gamma_t: float,
                                    delta: float) -> FisherBreakdown:
    """Analytic asymptotic breakdown for the exponential pulse with linear phase.

    gamma_t is the dimensionless duration and delta the effective detuning
    between the pulse center and the resonance (a linear temporal phase and
    a true detuning are interchangeable here).
    """
    if gamma < 0 or gamma_t <= 0:
        raise ValueError(f"require gamma >= 0 and gamma_t > 0, got {gamma}, {gamma_t}")
    g, T, D = gamma, gamma_t, delta
    u = g * T + T + 1.0
    lor = 4.0 * D**2 * T**2 + u**2
    p = 4.0 * g * T * ((g + 1.0) * T + 1.0) / ((g + 1.0) * lor)
    if g == 0.0:
        classical = 0.0
    else:
        num = g * T * (32.0 * D**2 * T**2 * (g + (g + 1.0) ** 2 * T)
                       + 8.0 * (g + (g**2 - 1.0) * T) * u**2) ** 2
        den = 16.0 * (g + 1.0) ** 3 * u * lor**3 * (1.0 - 4.0 * g * T * u / ((g + 1.0) * lor))
        classical = num / den
    num2 = 8.0 * T * (2.0 * g**3 + 4.0 * g**2 + 3.0 * g
                      + (g + 1.0) * T**2 * (2.0 * g**4 + 2.0 * g**3 + g**2 * (8.0 * D**2 + 3.0)
                                            + 8.0 * g * D**2 + 4.0 * D**2 + 1.0)
                      + (4.0 * g**4 + 8.0 * g**3 + 8.0 * g**2 + 4.0 * g + 2.0) * T + 1.0)
    den2 = (g + 1.0) ** 3 * lor * (g + (g + 1.0) * T**2 * (g**2 - 2.0 * g + 4.0 * D**2 + 1.0)
                                   + 2.0 * (g**2 + 1.0) * T + 1.0)
    quantum = num2 / den2
    return FisherBreakdown(classical, quantum, classical + quantum, p)


def spectral_overlap(pulse_spectrum, params: SystemParams,
                     rel_tol: float = 1e-10, tol: float = 1e-8) -> OverlapReport:
    """Overlap of the normalized outgoing photon with its coupling derivative.

    Vanishes exactly for pulses whose spectral density is symmetric about
    the resonance; its real part must vanish for any pulse (normalization),
    so the returned value is a numerical-residual diagnostic as well.
    """
    density = _resolve_density(pulse_spectrum)
    g = params.coupling
    sg = math.sqrt(g)
    gp = params.gamma_perp

    def f_of(w):
        return sg / (0.5 * (g + gp) - 1j * (np.asarray(w, dtype=float) - params.detuning))

    sd = _line_integral(
        lambda w: -(1.0 - sg * np.conj(f_of(w))) * f_of(w) * (2.0 - sg * f_of(w)) / (2.0 * sg),
        density, params, rel_tol)
    if gp > 0.0:
        p = gp * _line_integral(lambda w: np.abs(f_of(w)) ** 2, density, params, rel_tol).real
        dp = gp * _line_integral(
            lambda w: np.abs(f_of(w)) ** 2 * (1.0 / g - f_of(w).real / sg),
            density, params, rel_tol).real
    else:
        p, dp = 0.0, 0.0
    overlap = (sd + 0.5 * dp) / (1.0 - p)
    return OverlapReport(complex(overlap), bool(abs(overlap) < tol))
