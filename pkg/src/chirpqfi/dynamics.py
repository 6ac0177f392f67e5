"""Scattering dynamics of a single-photon pulse on a lossy two-level system.

Computes the excitation amplitude, the outgoing (pulse-mode) and lost
(environment-mode) single-photon amplitudes, the vacuum probability, and
the derivative of each with respect to the coupling rate.  The derivative
convention: the environment rate and physical detuning are independent
system properties and are held fixed, as is the prepared pulse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatch, NodeMismatch
from .numerics import Grid, cumulative_trapezoid, evolve_driven_decay
from .pulses import SampledPulse

__all__ = [
    "SystemParams",
    "Trajectory",
    "AmplitudePair",
    "LossProbability",
    "OutgoingWavepacket",
    "excited_amplitude",
    "outgoing_wavepacket",
    "outgoing_norm_curve",
    "environment_norm_curve",
    "loss_probability",
    "characteristic_function",
    "asymptotic_spectra",
    "AsymptoticSpectra",
]


@dataclass(frozen=True)
class SystemParams:
    """Coupling-rate evaluation point plus dimensionless ratios.

    gamma is the environment-to-pulse coupling ratio and delta the detuning
    ratio, both quoted at the evaluation coupling.  perturb_coupling keeps
    the absolute environment rate and detuning fixed, which is the
    differentiation convention used throughout.
    """

    gamma: float = 0.0
    delta: float = 0.0
    coupling: float = 1.0

    def __post_init__(self):
        if not (self.coupling > 0 and math.isfinite(self.coupling)):
            raise ValueError(f"coupling must be positive, got {self.coupling}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")

    @property
    def gamma_perp(self) -> float:
        return self.gamma * self.coupling

    @property
    def detuning(self) -> float:
        return self.delta * self.coupling

    def decay_rate(self) -> complex:
        return 0.5 * (self.coupling + self.gamma_perp) + 1j * self.detuning

    def perturb_coupling(self, d: float) -> "SystemParams":
        """Same physical system probed at coupling + d."""
        g_new = self.coupling + d
        return SystemParams(gamma=self.gamma_perp / g_new, delta=self.detuning / g_new,
                            coupling=g_new)


@dataclass(frozen=True)
class Trajectory:
    """Complex amplitude samples and their coupling derivative on a grid."""

    grid: Grid
    value: np.ndarray
    d_value: np.ndarray


@dataclass(frozen=True)
class AmplitudePair:
    """A probability together with its coupling derivative."""

    p: float
    dp: float


@dataclass(frozen=True)
class LossProbability:
    """Vacuum (photon-loss) probability as a function of the detection time."""

    grid: Grid
    p: np.ndarray
    dp: np.ndarray

    def at(self, t: float) -> AmplitudePair:
        i = self.grid.index_of(t)
        return AmplitudePair(float(self.p[i]), float(self.dp[i]))

    def asymptotic(self) -> AmplitudePair:
        return AmplitudePair(float(self.p[-1]), float(self.dp[-1]))


def excited_amplitude(pulse: SampledPulse, params: SystemParams) -> Trajectory:
    """Excitation amplitude of the system driven by the pulse.

    The amplitude solves psi' = -B psi - sqrt(G) xi with
    B = (G + G_perp)/2 + i*Delta and psi(t_start) = 0.  The derivative
    channel solves the differentiated equation,
    (d psi)' = -B (d psi) - psi/2 - xi/(2 sqrt(G)), driven by the value
    channel and the differentiated drive.
    """
    g = params.coupling
    rate = params.decay_rate()
    value = evolve_driven_decay(rate, -math.sqrt(g) * pulse.values, pulse.grid)
    d_drive = -0.5 * value - pulse.values / (2.0 * math.sqrt(g))
    d_value = evolve_driven_decay(rate, d_drive, pulse.grid)
    return Trajectory(pulse.grid, value, d_value)


@dataclass(frozen=True)
class OutgoingWavepacket:
    """Unnormalized outgoing single-photon amplitude over emission time.

    values[tau] is xi(tau) + sqrt(G) psi_e(tau) for tau <= t_detect and
    xi(tau) beyond; d_values is the coupling-derivative channel, supported
    on tau <= t_detect.  jump records the step at the pulse onset node
    (the derivative channel is continuous there).
    """

    grid: Grid
    values: np.ndarray
    d_values: np.ndarray
    t_index: int
    jump: complex = 0.0
    onset_index: Optional[int] = None

    @property
    def t_detect(self) -> float:
        return self.grid.t_start + self.t_index * self.grid.dt


def outgoing_wavepacket(pulse: SampledPulse, params: SystemParams,
                        excited: Trajectory, t_detect: float) -> OutgoingWavepacket:
    """Outgoing wavepacket amplitudes at detection time t_detect.

    Raises:
        NodeMismatch: if t_detect is not a node of the pulse grid.
        GridMismatch: if the excited trajectory lives on a different grid.
    """
    if excited.grid != pulse.grid:
        raise GridMismatch("excited trajectory and pulse live on different grids")
    try:
        t_index = pulse.grid.index_of(t_detect)
    except ValueError as exc:
        raise NodeMismatch(str(exc)) from None
    g = params.coupling
    sg = math.sqrt(g)
    theta = np.zeros(pulse.grid.n_points)
    theta[: t_index + 1] = 1.0
    values = pulse.values + sg * theta * excited.value
    d_values = theta * (excited.value / (2.0 * sg) + sg * excited.d_value)
    return OutgoingWavepacket(pulse.grid, values, d_values, t_index,
                              jump=pulse.jump, onset_index=pulse.onset_index)


def _cumulative_abs2(samples: np.ndarray, dx: float, jump: complex,
                     onset_index: Optional[int]) -> np.ndarray:
    """Cumulative integral of |samples|^2, step-corrected past the onset node."""
    out = cumulative_trapezoid(np.abs(samples) ** 2, dx).real.copy()
    if onset_index is not None and jump != 0.0:
        out[onset_index + 1:] += 0.25 * dx * abs(jump) ** 2
    return out


def outgoing_norm_curve(pulse: SampledPulse, params: SystemParams,
                        excited: Trajectory) -> np.ndarray:
    """Squared norm of the outgoing wavepacket as a function of detection time.

    Splits the emission-time integral at the detection node: the scattered
    part accumulates up to it, the untouched remainder of the pulse lies
    beyond it, so the step at the detection time is never smeared.
    """
    g = params.coupling
    scattered = pulse.values + math.sqrt(g) * excited.value
    left = _cumulative_abs2(scattered, pulse.grid.dt, pulse.jump, pulse.onset_index)
    cum_xi = _cumulative_abs2(pulse.values, pulse.grid.dt, pulse.jump, pulse.onset_index)
    tail = pulse.norm_sq() - cum_xi
    return left + tail


def environment_norm_curve(params: SystemParams, excited: Trajectory) -> np.ndarray:
    """Squared norm of the environment amplitude vs detection time."""
    return params.gamma_perp * cumulative_trapezoid(np.abs(excited.value) ** 2,
                                                    excited.grid.dt).real


def loss_probability(pulse: SampledPulse, params: SystemParams,
                     excited: Trajectory) -> LossProbability:
    """Vacuum probability p(t) = |psi_e(t)|^2 + G_perp * int_{-inf}^t |psi_e|^2,
    with its coupling derivative assembled from the derivative channel."""
    dt = pulse.grid.dt
    abs2 = np.abs(excited.value) ** 2
    cross = 2.0 * np.real(np.conj(excited.value) * excited.d_value)
    gp = params.gamma_perp
    p = abs2 + gp * cumulative_trapezoid(abs2, dt).real
    dp = cross + gp * cumulative_trapezoid(cross, dt).real
    # clamp roundoff excursions just outside [0, 1]
    if p.min() < -1e-9 or p.max() > 1.0 + 1e-9:
        raise ValueError(f"loss probability escaped [0,1]: [{p.min()}, {p.max()}]")
    return LossProbability(pulse.grid, np.clip(p, 0.0, 1.0), dp)


def characteristic_function(params: SystemParams, omega):
    """Lorentzian response f(omega) of the system and its coupling derivative.

    f = sqrt(G) / ((G + G_perp)/2 - i(omega - Delta)); the derivative holds
    G_perp and Delta fixed: df = f/(2G) - f^2/(2 sqrt(G)).
    """
    omega = np.asarray(omega, dtype=float)
    g = params.coupling
    denom = 0.5 * (g + params.gamma_perp) - 1j * (omega - params.detuning)
    f = np.sqrt(g) / denom
    df = f / (2.0 * g) - f**2 / (2.0 * math.sqrt(g))
    return f, df


@dataclass
class AsymptoticSpectra:
    """Frequency-domain outgoing (P) and environment (E) channels at late times."""

    xi_tilde: object  # callable omega -> complex spectral amplitude
    params: SystemParams

    def p_channel(self, omega):
        """(amplitude, coupling-derivative) of the outgoing channel."""
        f, df = characteristic_function(self.params, omega)
        xi = self.xi_tilde(omega)
        sg = math.sqrt(self.params.coupling)
        return xi * (1.0 - sg * f), -xi / (2.0 * sg) * (f + 2.0 * self.params.coupling * df)

    def e_channel(self, omega):
        """(amplitude, coupling-derivative) of the environment channel."""
        f, df = characteristic_function(self.params, omega)
        xi = self.xi_tilde(omega)
        sgp = math.sqrt(self.params.gamma_perp)
        return -sgp * xi * f, -sgp * xi * df


def asymptotic_spectra(xi_tilde, params: SystemParams) -> AsymptoticSpectra:
    """Late-time frequency-domain amplitudes for a pulse spectrum xi~(omega)."""
    return AsymptoticSpectra(xi_tilde, params)
