"""Dimensionless run parameters, unit conversions, and the ratchet initial density.

Everything downstream (map engine, pendulum limit, quantum engine, sweeps)
consumes the validated :class:`KickParams` record built here.  The pulse
period never appears as an independent quantity: it is always reconstructed
as ``tau = 2*pi*ell + epsilon`` so the resonance index and the detuning can
not drift out of sync.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(x):
    """Reduce an angle (scalar or array) into [-pi, pi)."""
    wrapped = np.mod(np.asarray(x, dtype=float) + math.pi, TWO_PI) - math.pi
    if np.ndim(x) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class KickParams:
    """Dimensionless parameter set of one kicked-rotor run.

    Attributes
    ----------
    ell : int
        Resonance index; the pulse period sits near ``2*pi*ell``.
    epsilon : float
        Signed detuning of the pulse period from that resonance.  It plays
        the role of an effective Planck constant for the map engine.
    phi_d : float
        Kick strength.
    gamma : float
        Phase of the initial two-state superposition, radians.  Stored
        wrapped into [-pi, pi).
    beta : float
        Quasi-momentum, the conserved fractional part of the momentum in
        units of two photon recoils.  Must lie in [0, 1).
    kicks : int
        Number of kicks to apply (q_max).
    """

    ell: int
    epsilon: float
    phi_d: float
    gamma: float
    beta: float
    kicks: int

    def __post_init__(self):
        if self.ell < 0:
            raise ValueError("ell must be a non-negative integer")
        if self.phi_d <= 0:
            raise ValueError("phi-d must be positive")
        if self.kicks < 1:
            raise ValueError("kicks must be at least 1")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must lie in [0, 1)")
        if self.tau <= 0.0:
            raise ValueError(
                "tau = 2*pi*ell + epsilon must be positive (ell = 0 needs epsilon > 0)"
            )
        object.__setattr__(self, "gamma", wrap_angle(self.gamma))

    @property
    def tau(self) -> float:
        """Scaled pulse period, always recomputed from (ell, epsilon)."""
        return TWO_PI * self.ell + self.epsilon

    @property
    def ktilde(self) -> float:
        """Scaled kicking strength |epsilon| * phi_d of the map engine."""
        return abs(self.epsilon) * self.phi_d

    @property
    def eclassical_applicable(self) -> bool:
        """False exactly on resonance, where only the quantum engine applies."""
        return self.epsilon != 0.0

    def x_at(self, q: int) -> float:
        """Scaling variable x = sqrt(phi_d |epsilon|) * q at kick q."""
        return math.sqrt(self.ktilde) * q


def derive_params(ell, epsilon, phi_d, gamma, beta, kicks) -> KickParams:
    """Validate raw inputs into a :class:`KickParams` record.

    Rejects non-positive tau or phi_d.  epsilon = 0 is accepted but the
    record reports ``eclassical_applicable == False``; the map engine
    refuses to run on it.
    """
    return KickParams(
        ell=int(ell),
        epsilon=float(epsilon),
        phi_d=float(phi_d),
        gamma=float(gamma),
        beta=float(beta),
        kicks=int(kicks),
    )


@dataclass(frozen=True)
class PhysicalUnits:
    """Laboratory conversion constants.

    Only the half-Talbot time enters the dimensionless model; the grating
    wavelength is optional metadata.  Rabi frequency, pulse length and laser
    detuning are deliberately not modelled since they enter only through
    phi_d.
    """

    half_talbot_us: float = 51.5
    grating_wavelength_nm: float | None = None

    def __post_init__(self):
        if self.half_talbot_us <= 0:
            raise ValueError("half-Talbot time must be positive")


def tau_from_period(period_us: float, units: PhysicalUnits = PhysicalUnits()) -> float:
    """Scaled pulse period 2*pi*T / T_half for a pulse period in microseconds."""
    if period_us <= 0:
        raise ValueError("pulse period must be positive")
    return TWO_PI * period_us / units.half_talbot_us


def initial_density_at(theta, gamma: float):
    """Position density (1 + cos(theta + gamma)) / 2pi of the superposition state."""
    dens = (1.0 + np.cos(np.asarray(theta, dtype=float) + gamma)) / TWO_PI
    if np.ndim(theta) == 0:
        return float(dens)
    return dens


@dataclass(frozen=True)
class InitialDensity:
    """Callable wrapper around :func:`initial_density_at` for a fixed gamma."""

    gamma: float

    def __call__(self, theta):
        return initial_density_at(theta, self.gamma)


def quadrature_nodes(gamma: float, n: int):
    """Deterministic discretization of the initial density.

    Returns ``(theta0, weights)``: ``n`` uniformly spaced nodes on [-pi, pi)
    with weights ``P(theta0) * 2pi/n``.  The trapezoid rule on a smooth
    periodic integrand is spectrally accurate, so the weights sum to 1 to
    machine precision already for modest n.
    """
    if n < 8:
        raise ValueError("quadrature needs at least 8 nodes")
    theta0 = -math.pi + TWO_PI * np.arange(n) / n
    weights = initial_density_at(theta0, gamma) * (TWO_PI / n)
    return theta0, weights


def rejection_sample_nodes(gamma: float, n: int, seed: int):
    """Monte Carlo alternative to :func:`quadrature_nodes`.

    Rejection sampling under the flat envelope 1/pi (twice the mean density);
    every accepted node carries weight 1/n.  Intended for statistical-error
    studies, not for the deterministic acceptance runs.
    """
    if n < 8:
        raise ValueError("sampling needs at least 8 nodes")
    rng = np.random.default_rng(seed)
    nodes = np.empty(n)
    filled = 0
    while filled < n:
        chunk = 2 * (n - filled) + 16
        cand = rng.uniform(-math.pi, math.pi, size=chunk)
        height = rng.uniform(0.0, 1.0 / math.pi, size=chunk)
        accepted = cand[height < initial_density_at(cand, gamma)]
        take = min(accepted.size, n - filled)
        nodes[filled : filled + take] = accepted[:take]
        filled += take
    weights = np.full(n, 1.0 / n)
    return nodes, weights
