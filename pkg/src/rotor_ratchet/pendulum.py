"""Pendulum limit of the kick map and the one-parameter scaling function.

In scaled time s the flow is

    dtheta/ds = J',    dJ'/ds = sin(theta),

which conserves H' = J'^2 / 2 + cos(theta).  The scaling function

    F(x) = (1/2pi) Int sin(theta0) J'(theta0, J0'=0, x) dtheta0

is evaluated by trapezoid quadrature over a midpoint-shifted theta0 grid
(no node sits exactly on the equilibria at 0 and +-pi) with a fixed-step
4th-order integrator.  F(x)/x is the predicted scaled ratchet current;
its small-x limit is 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import KickParams, TWO_PI, wrap_angle
from .io import format_cell

DEFAULT_DT = 1e-3
DEFAULT_QUAD_N = 1024

SCALING_HEADER = ("x", "F", "F_over_x")


@dataclass(frozen=True)
class PendulumState:
    theta: float
    Jp: float

    def energy(self) -> float:
        """Conserved pendulum energy H' = Jp^2/2 + cos(theta)."""
        return 0.5 * self.Jp * self.Jp + math.cos(self.theta)


@dataclass(frozen=True)
class ScalingPoint:
    x: float
    F: float
    F_over_x: float


def _rk4_step(theta, jp, h):
    k1t = jp
    k1j = np.sin(theta)
    k2t = jp + 0.5 * h * k1j
    k2j = np.sin(theta + 0.5 * h * k1t)
    k3t = jp + 0.5 * h * k2j
    k3j = np.sin(theta + 0.5 * h * k2t)
    k4t = jp + h * k3j
    k4j = np.sin(theta + h * k3t)
    theta = theta + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
    jp = jp + (h / 6.0) * (k1j + 2.0 * k2j + 2.0 * k3j + k4j)
    return theta, jp


def _flow_samples(theta, jp, targets, dt):
    """March the flow with uniform dt steps, sampling at each target time.

    Targets must be ascending.  A target that is not a whole number of steps
    away is reached by one shortened step taken on a copy of the state, so
    the main march always sees the identical full-step sequence no matter
    how many targets are requested.  This makes a multi-target sweep
    bitwise-equal to independent single-target integrations.
    """
    theta = np.array(theta, dtype=float, copy=True)
    jp = np.array(jp, dtype=float, copy=True)
    samples = []
    steps_done = 0
    for target in targets:
        n_full = int(math.floor(target / dt + 1e-9))
        while steps_done < n_full:
            theta, jp = _rk4_step(theta, jp, dt)
            steps_done += 1
        remainder = target - n_full * dt
        if remainder > dt * 1e-9:
            th_s, jp_s = _rk4_step(theta, jp, remainder)
        else:
            th_s, jp_s = theta.copy(), jp.copy()
        samples.append((th_s, jp_s))
    return samples


def pendulum_flow(theta0: float, Jp0: float, x: float, dt: float = DEFAULT_DT) -> PendulumState:
    """State of the pendulum flow at scaled time x from (theta0, Jp0)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x > 0 and dt > x / 10.0:
        raise ValueError("dt too coarse: need dt <= x/10")
    samples = _flow_samples(np.array([theta0]), np.array([Jp0]), [x], dt)
    th, jp = samples[0]
    return PendulumState(float(th[0]), float(jp[0]))


def _midpoint_grid(n: int) -> np.ndarray:
    # shifted half a cell so no node sits on the equilibria theta0 = 0, +-pi
    return -math.pi + (np.arange(n) + 0.5) * (TWO_PI / n)


def scaling_points(
    x_values,
    quad_N: int = DEFAULT_QUAD_N,
    dt: float = DEFAULT_DT,
) -> list[ScalingPoint]:
    """F(x) at each requested x, all from one march of the quadrature ensemble.

    Because sampling never perturbs the march (see :func:`_flow_samples`),
    evaluating many x values together is bitwise-equal to evaluating each one
    on its own.
    """
    if quad_N < 256:
        raise ValueError("quadrature needs at least 256 nodes")
    xs = [float(x) for x in x_values]
    if any(x < 0 for x in xs):
        raise ValueError("x must be non-negative")
    ascending = sorted(set(x for x in xs if x > 0))
    theta0 = _midpoint_grid(quad_N)
    sin_theta0 = np.sin(theta0)
    samples = _flow_samples(theta0, np.zeros(quad_N), ascending, dt)
    by_x = {0.0: ScalingPoint(0.0, 0.0, 0.5)}
    for x, (_, jp) in zip(ascending, samples):
        F = float(np.dot(sin_theta0, jp) / quad_N)
        by_x[x] = ScalingPoint(x, F, F / x)
    return [by_x[x] for x in xs]


def scaling_F(x: float, quad_N: int = DEFAULT_QUAD_N, dt: float = DEFAULT_DT) -> ScalingPoint:
    """F(x) and F(x)/x by quadrature over pendulum trajectories started at rest."""
    return scaling_points([x], quad_N, dt)[0]


def scaling_curve(
    x_max: float,
    steps: int,
    quad_N: int = DEFAULT_QUAD_N,
    dt: float = DEFAULT_DT,
) -> list[ScalingPoint]:
    """F(x) on a uniform x grid from 0 to x_max inclusive."""
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    if steps < 2:
        raise ValueError("need at least 2 grid points")
    return scaling_points(np.linspace(0.0, x_max, steps), quad_N, dt)


def map_scaling_F(
    x_targets,
    ktilde: float = 1e-4,
    quad_N: int = DEFAULT_QUAD_N,
) -> list[ScalingPoint]:
    """F(x) from iterating the kick map itself at small ktilde.

    The map with step sqrt(ktilde) in scaled time is an independent
    discretization of the pendulum flow: J' = J / sqrt(ktilde) after
    q = x / sqrt(ktilde) kicks.  Used to cross-check :func:`scaling_F`.
    """
    if ktilde <= 0:
        raise ValueError("ktilde must be positive")
    if quad_N < 256:
        raise ValueError("quadrature needs at least 256 nodes")
    root_k = math.sqrt(ktilde)
    targets = sorted(float(x) for x in x_targets)
    if targets and targets[0] < 0:
        raise ValueError("x must be non-negative")
    theta0 = _midpoint_grid(quad_N)
    sin_theta0 = np.sin(theta0)
    theta = theta0.copy()
    J = np.zeros(quad_N)
    points = {}
    q_done = 0
    for x in targets:
        q_target = int(round(x / root_k))
        while q_done < q_target:
            theta = wrap_angle(theta + J)
            J = J + ktilde * np.sin(theta)
            q_done += 1
        x_eff = root_k * q_target
        F = float(np.dot(sin_theta0, J / root_k) / quad_N)
        points[x] = ScalingPoint(x_eff, F, F / x_eff if x_eff > 0 else 0.5)
    return [points[float(x)] for x in x_targets]


def predict_mean_momentum(
    params: KickParams,
    q: int,
    quad_N: int = DEFAULT_QUAD_N,
    dt: float = DEFAULT_DT,
) -> float:
    """Predicted mean momentum -phi_d * q * sin(gamma) * F(x)/x at kick q."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if params.ktilde == 0:
        raise ValueError("the prediction needs |epsilon| > 0")
    point = scaling_F(params.x_at(q), quad_N, dt)
    return -params.phi_d * q * math.sin(params.gamma) * point.F_over_x


def scaling_points_to_rows(points) -> list[tuple]:
    return [(p.x, p.F, p.F_over_x) for p in points]


def scaling_points_to_csv(points) -> str:
    lines = [",".join(SCALING_HEADER)]
    for row in scaling_points_to_rows(points):
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"
