"""Kick-to-kick map engine over weighted ensembles.

The map advances the position first and the momentum second,

    theta' = theta + J   (mod 2pi),   J' = J + ktilde * sin(theta'),

with ktilde = |epsilon| * phi_d.  theta lives on [-pi, pi); J is never
wrapped, because reconstructing the physical momentum needs the winding.
The momentum readout is p = p0 + (J - J0) / epsilon per particle, where p0
is the nominal integer momentum the particle started from (0 or 1 in
physical mode, 0 in theory mode where J0 is forced to zero).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    KickParams,
    TWO_PI,
    quadrature_nodes,
    rejection_sample_nodes,
    wrap_angle,
)
from .trajectory import Trajectory, TrajectoryPoint

MODES = ("theory", "physical")
SCHEMES = ("quadrature", "montecarlo")

# |sin(gamma)| below this marks the scaled current as undefined
SIN_GAMMA_FLOOR = 1e-12


@dataclass(frozen=True)
class MapParticle:
    """One phase-space point with its statistical weight."""

    theta: float
    J: float
    weight: float

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("particle weight must be non-negative")


@dataclass(frozen=True)
class EnsembleProvenance:
    gamma: float
    scheme: str
    n_nodes: int
    mode: str
    p_components: tuple[int, ...]
    seed: int | None = None


@dataclass
class Ensemble:
    """Weighted particle collection, stored as parallel arrays.

    ``p0`` carries the nominal integer momentum each particle represents;
    the evolution uses it to anchor the momentum readout.
    """

    theta: np.ndarray
    J: np.ndarray
    weight: np.ndarray
    p0: np.ndarray
    provenance: EnsembleProvenance

    def __post_init__(self):
        if self.theta.size == 0:
            raise ValueError("ensemble must not be empty")
        total = float(self.weight.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"ensemble weights sum to {total!r}, expected 1")

    def __len__(self) -> int:
        return int(self.theta.size)

    @property
    def particles(self) -> list[MapParticle]:
        return [
            MapParticle(float(t), float(j), float(w))
            for t, j, w in zip(self.theta, self.J, self.weight)
        ]


def scaled_kick_strength(epsilon: float, phi_d: float) -> float:
    """ktilde = |epsilon| * phi_d."""
    if phi_d <= 0:
        raise ValueError("phi-d must be positive")
    return abs(epsilon) * phi_d


def initial_J(p0: int, params: KickParams) -> float:
    """Initial scaled momentum epsilon*p0 + ell*pi + tau*beta, wrapped to [-pi, pi)."""
    return wrap_angle(params.epsilon * p0 + params.ell * math.pi + params.tau * params.beta)


def theta_offset(X, epsilon: float):
    """Map position coordinate: X itself for epsilon > 0, X + pi for epsilon < 0.

    The offset absorbs the sign of the kick impulse so the map can always be
    written with +ktilde * sin(theta).
    """
    if epsilon == 0:
        raise ValueError("epsilon = 0: the map engine does not apply")
    if epsilon > 0:
        return wrap_angle(X)
    return wrap_angle(np.asarray(X, dtype=float) + math.pi)


def map_step(particle: MapParticle, ktilde: float) -> MapParticle:
    """One kick: theta updated first, then J; the weight rides along."""
    if ktilde < 0:
        raise ValueError("ktilde must be non-negative")
    theta = wrap_angle(particle.theta + particle.J)
    return MapParticle(theta, particle.J + ktilde * math.sin(theta), particle.weight)


def build_ratchet_ensemble(
    params: KickParams,
    n: int = 1024,
    mode: str = "theory",
    scheme: str = "quadrature",
    seed: int | None = None,
) -> Ensemble:
    """Discretize the two-state initial density into map particles.

    theory mode starts every particle at J0 = 0 (the resonance-island
    approximation); physical mode splits each position node into the p0 = 0
    and p0 = 1 momentum components at half weight with J0 from
    :func:`initial_J`.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if n < 64:
        raise ValueError("ensemble needs at least 64 nodes")
    if not params.eclassical_applicable:
        raise ValueError("epsilon = 0: the map engine does not apply, use the quantum engine")

    if scheme == "quadrature":
        nodes, weights = quadrature_nodes(params.gamma, n)
    else:
        nodes, weights = rejection_sample_nodes(params.gamma, n, 0 if seed is None else seed)
    theta = theta_offset(nodes, params.epsilon)

    if mode == "theory":
        J = np.zeros(n)
        p0 = np.zeros(n)
        p_components = (0,)
    else:
        theta = np.concatenate([theta, theta])
        weights = np.concatenate([weights / 2.0, weights / 2.0])
        p0 = np.concatenate([np.zeros(n), np.ones(n)])
        J = np.array([initial_J(int(c), params) for c in (0, 1)])[p0.astype(int)]
        p_components = (0, 1)

    return Ensemble(
        theta=theta,
        J=J,
        weight=weights,
        p0=p0,
        provenance=EnsembleProvenance(
            gamma=params.gamma,
            scheme=scheme,
            n_nodes=n,
            mode=mode,
            p_components=p_components,
            seed=seed,
        ),
    )


def _evolve_chunk(theta, J, weight, p0, ktilde, epsilon, kicks):
    """Evolve one particle block, returning per-kick partial sums.

    Output rows are (sum w*p, sum w*p^2, sum w) for q = 0..kicks.  The block
    owns copies of its arrays, so blocks can run concurrently.
    """
    theta = theta.copy()
    J = J.copy()
    J0 = J.copy()
    sums = np.empty((kicks + 1, 3))

    def record(row):
        p = p0 + (J - J0) / epsilon
        sums[row, 0] = np.dot(weight, p)
        sums[row, 1] = np.dot(weight, p * p)
        sums[row, 2] = weight.sum()

    record(0)
    for q in range(1, kicks + 1):
        theta += J
        theta = wrap_angle(theta)
        J += ktilde * np.sin(theta)
        record(q)
    return sums


def evolve(
    ensemble: Ensemble,
    params: KickParams,
    partitions: int = 1,
    max_workers: int | None = None,
) -> Trajectory:
    """Iterate the map over the ensemble and record per-kick observables.

    Particles are split into ``partitions`` contiguous blocks that may be
    evolved concurrently; partial sums are reduced in fixed block order, so
    the result is bit-stable for a given partition count and agrees across
    partition counts to floating-point roundoff.
    """
    ktilde = params.ktilde
    if ktilde <= 0:
        raise ValueError("epsilon = 0: the map engine does not apply, use the quantum engine")
    partitions = max(1, min(int(partitions), len(ensemble)))

    bounds = np.linspace(0, len(ensemble), partitions + 1).astype(int)
    blocks = [
        (
            ensemble.theta[a:b],
            ensemble.J[a:b],
            ensemble.weight[a:b],
            ensemble.p0[a:b],
        )
        for a, b in zip(bounds[:-1], bounds[1:])
        if b > a
    ]

    if len(blocks) == 1:
        partials = [
            _evolve_chunk(*blocks[0], ktilde, params.epsilon, params.kicks)
        ]
    else:
        workers = max_workers or min(len(blocks), os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_evolve_chunk, *blk, ktilde, params.epsilon, params.kicks)
                for blk in blocks
            ]
            partials = [f.result() for f in futures]

    totals = partials[0].copy()
    for part in partials[1:]:
        totals += part

    sin_gamma = math.sin(params.gamma)
    current_defined = abs(sin_gamma) > SIN_GAMMA_FLOOR
    mean_p0 = totals[0, 0]

    points = []
    for q in range(params.kicks + 1):
        mean_p = float(totals[q, 0])
        mean_energy = float(totals[q, 1]) / 2.0
        scaled = None
        if current_defined and q > 0:
            scaled = (mean_p - float(mean_p0)) / (-params.phi_d * q * sin_gamma)
        points.append(
            TrajectoryPoint(
                q=q,
                x=params.x_at(q),
                mean_p=mean_p,
                mean_energy=mean_energy,
                scaled_current=scaled,
            )
        )
    return Trajectory(
        points=tuple(points),
        params=params,
        engine="eclassical",
        mode=ensemble.provenance.mode,
    )
