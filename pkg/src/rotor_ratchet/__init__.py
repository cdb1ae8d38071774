"""Kicked-rotor atomic ratchet toolkit.

Simulates the directed atom current seeded by a two-state superposition
under periodic standing-wave kicks: a classical-like map engine valid near
the rotor resonances, the pendulum-limit scaling function that predicts the
current from the single variable x = sqrt(phi_d |epsilon|) q, the exact
quantum evolution of the beta-rotor, and deterministic parameter sweeps
that map the crossover between the two regimes.
"""

from ._version import __version__
from .core import (
    InitialDensity,
    KickParams,
    PhysicalUnits,
    derive_params,
    initial_density_at,
    quadrature_nodes,
    rejection_sample_nodes,
    tau_from_period,
    wrap_angle,
)
from .eclassical import (
    Ensemble,
    MapParticle,
    build_ratchet_ensemble,
    initial_J,
    map_step,
    scaled_kick_strength,
    theta_offset,
)
from .eclassical import evolve as evolve_map
from .pendulum import (
    PendulumState,
    ScalingPoint,
    map_scaling_F,
    pendulum_flow,
    predict_mean_momentum,
    scaling_F,
    scaling_curve,
    scaling_points,
)
from .quantum import (
    LeakageError,
    RotorState,
    apply_free,
    apply_kick,
    apply_kick_splitstep,
    init_superposition,
    momentum_distribution,
)
from .quantum import evolve as evolve_quantum
from .sweep import (
    GridResult,
    SweepSpec,
    curve_deviation,
    nearest_resonance,
    run_collapse_suite,
    run_energy_collapse,
    run_tau_scan,
)
from .trajectory import Trajectory, TrajectoryPoint

__all__ = [
    "__version__",
    "InitialDensity",
    "KickParams",
    "PhysicalUnits",
    "derive_params",
    "initial_density_at",
    "quadrature_nodes",
    "rejection_sample_nodes",
    "tau_from_period",
    "wrap_angle",
    "Ensemble",
    "MapParticle",
    "build_ratchet_ensemble",
    "initial_J",
    "map_step",
    "scaled_kick_strength",
    "theta_offset",
    "evolve_map",
    "PendulumState",
    "ScalingPoint",
    "map_scaling_F",
    "pendulum_flow",
    "predict_mean_momentum",
    "scaling_F",
    "scaling_curve",
    "scaling_points",
    "LeakageError",
    "RotorState",
    "apply_free",
    "apply_kick",
    "apply_kick_splitstep",
    "init_superposition",
    "momentum_distribution",
    "evolve_quantum",
    "GridResult",
    "SweepSpec",
    "curve_deviation",
    "nearest_resonance",
    "run_collapse_suite",
    "run_energy_collapse",
    "run_tau_scan",
    "Trajectory",
    "TrajectoryPoint",
]
