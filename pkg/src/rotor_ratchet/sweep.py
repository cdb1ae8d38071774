"""Parameter-scan orchestration with deterministic output.

Three suites: the scaling-collapse table (several (phi_d, epsilon) combos
against the scaling variable x), the tau scan (quantum runs across pulse
periods between the ell = 0 and ell = 1 resonances), and the mean-energy
collapse.  Work items run on a thread pool in any order; results are always
reduced and emitted in canonical input order, so output bytes do not depend
on the parallelism setting.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .core import KickParams, TWO_PI
from .eclassical import build_ratchet_ensemble, evolve as evolve_map
from .io import (
    COLLAPSE_COLUMNS,
    ENERGY_COLUMNS,
    GRID_COLUMNS,
    table_to_csv,
    table_to_json,
)
from .pendulum import ScalingPoint, scaling_points
from .quantum import evolve as evolve_quantum
from .trajectory import Trajectory

ENGINES = ("eclassical", "quantum", "pendulum")

# |epsilon| below this marks a tau-scan row as resonance-exact (x degenerate)
RESONANCE_EPSILON_FLOOR = 1e-6


@dataclass(frozen=True)
class SweepSpec:
    """Inputs of one sweep.

    ``combos`` rows are (phi_d, epsilon) or (phi_d, epsilon, gamma); ``taus``
    holds the pulse periods of a tau scan.  The seed only matters for Monte
    Carlo ensembles but is always recorded in output metadata.
    """

    engine: str = "eclassical"
    combos: tuple = ()
    taus: tuple = ()
    phi_d: float = 1.8
    ell: int = 1
    gamma: float = -math.pi / 2
    beta: float = 0.5
    kicks: int = 20
    mode: str = "theory"
    scheme: str = "quadrature"
    ensemble_n: int = 1024
    basis_halfwidth: int | None = None
    seed: int = 0
    parallelism: int = 1

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.kicks < 1:
            raise ValueError("kicks must be at least 1")
        if self.parallelism < 1:
            raise ValueError("parallelism hint must be positive")

    def combo_params(self, combo) -> KickParams:
        phi_d, epsilon = combo[0], combo[1]
        gamma = combo[2] if len(combo) > 2 else self.gamma
        return KickParams(
            ell=self.ell,
            epsilon=float(epsilon),
            phi_d=float(phi_d),
            gamma=float(gamma),
            beta=self.beta,
            kicks=self.kicks,
        )


def resolve_workers(hint: int | None = None) -> int:
    """Worker count: explicit hint, else RATCHET_THREADS, else 1."""
    if hint is not None and hint >= 1:
        return int(hint)
    env = os.environ.get("RATCHET_THREADS", "")
    if env.strip().isdigit() and int(env) >= 1:
        return int(env)
    return 1


def _map_ordered(func, items, workers: int):
    """Run func over items on a pool; results (or exceptions) in input order."""
    results = [None] * len(items)
    if workers <= 1 or len(items) <= 1:
        for i, item in enumerate(items):
            try:
                results[i] = (True, func(item))
            except Exception as err:  # collected, not raised: callers flag failures
                results[i] = (False, err)
        return results
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, item) for item in items]
        for i, future in enumerate(futures):
            err = future.exception()
            results[i] = (False, err) if err else (True, future.result())
    return results


def run_trajectory(spec: SweepSpec, params: KickParams) -> Trajectory:
    """One engine run under a sweep spec's ensemble/basis options."""
    if spec.engine == "quantum":
        return evolve_quantum(params, basis_halfwidth=spec.basis_halfwidth)
    ensemble = build_ratchet_ensemble(
        params, n=spec.ensemble_n, mode=spec.mode, scheme=spec.scheme, seed=spec.seed
    )
    return evolve_map(ensemble, params)


def _pendulum_rows(params: KickParams):
    qs = range(1, params.kicks + 1)
    points = scaling_points([params.x_at(q) for q in qs])
    return [(q, pt.x, pt.F_over_x) for q, pt in zip(qs, points)]


@dataclass(frozen=True)
class CollapseResult:
    """Long-format (combo, x, scaled_current) table plus per-combo failures."""

    spec: SweepSpec
    rows: tuple
    failures: tuple = ()

    header = COLLAPSE_COLUMNS

    def combo_series(self):
        """Rows grouped by (phi_d, epsilon, gamma), preserving combo order."""
        groups: dict[tuple, list] = {}
        for row in self.rows:
            groups.setdefault(row[:3], []).append(row[3:])
        return groups

    def metadata(self) -> list[str]:
        return _metadata_lines(self.spec)

    def to_csv(self) -> str:
        comments = self.metadata() + [f"failed combo {c}: {m}" for c, m in self.failures]
        return table_to_csv(self.header, self.rows, comments)

    def to_json(self) -> str:
        meta = dict(_metadata_pairs(self.spec))
        if self.failures:
            meta["failures"] = [f"{c}: {m}" for c, m in self.failures]
        return table_to_json(self.header, self.rows, meta)


def run_collapse_suite(spec: SweepSpec) -> CollapseResult:
    """Trajectories for every combo, merged on the scaling variable x.

    Engine errors are collected per combo without aborting the others;
    failed combos are flagged in the result and its CSV metadata.
    """
    if not spec.combos:
        raise ValueError("the collapse suite needs at least one (phi_d, epsilon) combo")
    workers = resolve_workers(spec.parallelism)

    def one(combo):
        params = spec.combo_params(combo)
        if spec.engine == "pendulum":
            triples = _pendulum_rows(params)
        else:
            traj = run_trajectory(spec, params)
            triples = [
                (p.q, p.x, p.scaled_current) for p in traj.points if p.q > 0
            ]
        return [
            (params.phi_d, params.epsilon, params.gamma, q, x, value)
            for q, x, value in triples
        ]

    outcomes = _map_ordered(one, list(spec.combos), workers)
    rows: list[tuple] = []
    failures = []
    for combo, (ok, payload) in zip(spec.combos, outcomes):
        if ok:
            rows.extend(payload)
        else:
            failures.append((tuple(combo), str(payload)))
    return CollapseResult(spec=spec, rows=tuple(rows), failures=tuple(failures))


@dataclass(frozen=True)
class EnergyResult:
    spec: SweepSpec
    rows: tuple
    failures: tuple = ()

    header = ENERGY_COLUMNS

    def combo_series(self):
        groups: dict[tuple, list] = {}
        for row in self.rows:
            groups.setdefault(row[:3], []).append(row[3:])
        return groups

    def collapse_deviation(self) -> float | None:
        """Largest pairwise |scaled energy| gap between combos at matched q."""
        series = list(self.combo_series().values())
        if len(series) < 2:
            return None
        worst = 0.0
        for i in range(len(series)):
            for j in range(i + 1, len(series)):
                a = {q: e for q, _, e in series[i]}
                b = {q: e for q, _, e in series[j]}
                for q in set(a) & set(b):
                    worst = max(worst, abs(a[q] - b[q]))
        return worst

    def to_csv(self) -> str:
        comments = _metadata_lines(self.spec) + [
            f"failed combo {c}: {m}" for c, m in self.failures
        ]
        dev = self.collapse_deviation()
        if dev is not None:
            comments.append(f"collapse_deviation={dev:.6g}")
        return table_to_csv(self.header, self.rows, comments)

    def to_json(self) -> str:
        meta = dict(_metadata_pairs(self.spec))
        dev = self.collapse_deviation()
        if dev is not None:
            meta["collapse_deviation"] = dev
        if self.failures:
            meta["failures"] = [f"{c}: {m}" for c, m in self.failures]
        return table_to_json(self.header, self.rows, meta)


def run_energy_collapse(spec: SweepSpec) -> EnergyResult:
    """Scaled mean energy E/(phi_d^2 q) per combo against x.

    Map engine only.  In the default theory mode the trajectory energy is the
    energy imparted by the kicks, the quantity whose curves collapse onto a
    single function of x.
    """
    if spec.engine != "eclassical":
        raise ValueError("the energy collapse runs on the map engine")
    if not spec.combos:
        raise ValueError("the energy collapse needs at least one combo")
    workers = resolve_workers(spec.parallelism)

    def one(combo):
        params = spec.combo_params(combo)
        traj = run_trajectory(spec, params)
        return [
            (
                params.phi_d,
                params.epsilon,
                params.gamma,
                p.q,
                p.x,
                p.mean_energy / (params.phi_d**2 * p.q),
            )
            for p in traj.points
            if p.q > 0
        ]

    outcomes = _map_ordered(one, list(spec.combos), workers)
    rows: list[tuple] = []
    failures = []
    for combo, (ok, payload) in zip(spec.combos, outcomes):
        if ok:
            rows.extend(payload)
        else:
            failures.append((tuple(combo), str(payload)))
    return EnergyResult(spec=spec, rows=tuple(rows), failures=tuple(failures))


def nearest_resonance(tau: float) -> tuple[int, float]:
    """(ell_star, epsilon) relative to the nearest resonance of tau."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    ell_star = int(round(tau / TWO_PI))
    return ell_star, tau - TWO_PI * ell_star


@dataclass(frozen=True)
class GridRow:
    tau: float
    ell_star: int
    epsilon: float
    resonance_exact: bool
    cells: tuple  # (q, x or None, scaled_current or None) per kick


@dataclass(frozen=True)
class GridResult:
    """tau-by-x matrix of the scaled mean momentum, long format."""

    spec: SweepSpec
    rows: tuple[GridRow, ...]
    failures: tuple = ()
    created_at: float = field(default_factory=time.time)

    header = GRID_COLUMNS

    def metadata(self) -> list[str]:
        # the creation timestamp stays in memory only: emitted output must be
        # byte-identical across reruns of the same spec
        return _metadata_lines(self.spec)

    def to_rows(self) -> list[tuple]:
        out = []
        for row in self.rows:
            for q, x, value in row.cells:
                out.append((row.tau, row.ell_star, row.epsilon, q, x, value))
        return out

    def to_csv(self) -> str:
        rows = self.to_rows()
        _check_monotone(self.rows)
        comments = self.metadata() + [f"failed row tau={t}: {m}" for t, m in self.failures]
        return table_to_csv(self.header, rows, comments)

    def to_json(self) -> str:
        meta = dict(_metadata_pairs(self.spec))
        if self.failures:
            meta["failures"] = [f"tau={t}: {m}" for t, m in self.failures]
        return table_to_json(self.header, self.to_rows(), meta)


def _check_monotone(rows: tuple[GridRow, ...]) -> None:
    taus = [r.tau for r in rows]
    if sorted(taus) != taus:
        raise ValueError("grid rows must be sorted by tau")
    for row in rows:
        xs = [x for _, x, _ in row.cells if x is not None]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("grid columns must increase in x")


def run_tau_row(spec: SweepSpec, tau: float) -> GridRow:
    """One tau-scan row: quantum trajectory classified against the nearest resonance."""
    ell_star, epsilon = nearest_resonance(tau)
    resonance_exact = abs(epsilon) < RESONANCE_EPSILON_FLOOR
    params = KickParams(
        ell=ell_star,
        epsilon=epsilon,
        phi_d=spec.phi_d,
        gamma=spec.gamma,
        beta=spec.beta,
        kicks=spec.kicks,
    )
    traj = evolve_quantum(params, basis_halfwidth=spec.basis_halfwidth)
    cells = tuple(
        (p.q, None if resonance_exact else p.x, p.scaled_current)
        for p in traj.points
        if p.q > 0
    )
    return GridRow(
        tau=tau,
        ell_star=ell_star,
        epsilon=epsilon,
        resonance_exact=resonance_exact,
        cells=cells,
    )


def run_tau_scan(spec: SweepSpec) -> GridResult:
    """Quantum crossover scan over pulse periods in (0, 2pi]."""
    if spec.engine != "quantum":
        raise ValueError("the tau scan requires the quantum engine")
    if not spec.taus:
        raise ValueError("the tau scan needs at least one tau row")
    for tau in spec.taus:
        if not 0.0 < tau <= TWO_PI:
            raise ValueError(f"tau rows must lie in (0, 2pi], got {tau!r}")
    taus = sorted(float(t) for t in spec.taus)
    workers = resolve_workers(spec.parallelism)
    outcomes = _map_ordered(lambda t: run_tau_row(spec, t), taus, workers)
    rows = []
    failures = []
    for tau, (ok, payload) in zip(taus, outcomes):
        if ok:
            rows.append(payload)
        else:
            failures.append((tau, str(payload)))
    return GridResult(spec=spec, rows=tuple(rows), failures=tuple(failures))


def curve_deviation(observed, reference: list[ScalingPoint]) -> float:
    """RMS distance between observed (x, value) pairs and the F(x)/x curve.

    The reference is linearly interpolated onto the observed x values over
    the overlapping x range; non-finite observations are ignored.
    """
    pairs = [
        (float(x), float(v))
        for x, v in observed
        if v is not None and math.isfinite(float(v)) and x is not None
    ]
    if not pairs:
        raise ValueError("no finite observations to compare")
    ref_x = np.array([p.x for p in reference])
    ref_v = np.array([p.F_over_x for p in reference])
    order = np.argsort(ref_x)
    ref_x, ref_v = ref_x[order], ref_v[order]
    obs_x = np.array([x for x, _ in pairs])
    obs_v = np.array([v for _, v in pairs])
    inside = (obs_x >= ref_x[0]) & (obs_x <= ref_x[-1])
    if not inside.any():
        raise ValueError("observed x range does not overlap the reference curve")
    interp = np.interp(obs_x[inside], ref_x, ref_v)
    return float(np.sqrt(np.mean((obs_v[inside] - interp) ** 2)))


def _metadata_pairs(spec: SweepSpec) -> list[tuple[str, object]]:
    return [
        ("engine", spec.engine),
        ("beta", spec.beta),
        ("phi_d", spec.phi_d),
        ("gamma", spec.gamma),
        ("kicks", spec.kicks),
        ("mode", spec.mode),
        ("seed", spec.seed),
        ("version", __version__),
    ]


def _metadata_lines(spec: SweepSpec) -> list[str]:
    return [f"{key}={value}" for key, value in _metadata_pairs(spec)]
