"""Command-line front end: one subcommand per engine plus the sweep suites.

Flag precedence is defaults < config file < command line.  The config file
is flat ``key=value`` text (keys: ell, epsilon, phi_d, gamma, beta, kicks,
ensemble_n, seed, engine, output, format).  Exit statuses: 1 usage,
2 engine failure, 3 I/O failure.  Output files are written atomically and
contain no timestamps, so a given invocation always produces identical
bytes.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from ._version import __version__
from .core import KickParams
from .eclassical import build_ratchet_ensemble, evolve as evolve_map
from .io import atomic_write_text, table_to_json
from .pendulum import scaling_curve, scaling_points_to_csv, scaling_points_to_rows, SCALING_HEADER
from .quantum import LeakageError, evolve as evolve_quantum, distributions_to_csv, distributions_to_rows, DISTRIBUTION_HEADER
from .sweep import SweepSpec, resolve_workers, run_collapse_suite, run_energy_collapse, run_tau_scan

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ENGINE = 2
EXIT_IO = 3

CONFIG_KEYS = {
    "ell": int,
    "epsilon": float,
    "phi_d": float,
    "gamma": float,
    "beta": float,
    "kicks": int,
    "ensemble_n": int,
    "seed": int,
    "engine": str,
    "output": str,
    "format": str,
}

DEFAULT_OUTPUTS = {
    "scaling-curve": "scaling_curve.csv",
    "ratchet": "trajectory.csv",
    "quantum": "distributions.csv",
    "tau-scan": "tau_scan.csv",
    "collapse": "collapse.csv",
    "energy-collapse": "energy_collapse.csv",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load_config(path: str) -> dict:
    """Parse flat key=value config text; unknown keys are usage errors."""
    values = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as err:
        raise UsageError(f"cannot read config file {path}: {err}") from err
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](value.strip())
        except ValueError as err:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {err}") from err
    return values


def _add_param_flags(parser, need_epsilon=True):
    parser.add_argument("--phi-d", dest="phi_d", type=float, help="kick strength phi_d (> 0)")
    if need_epsilon:
        parser.add_argument("--epsilon", type=float, help="signed detuning from the resonance")
        parser.add_argument("--ell", type=int, help="resonance index (>= 0)")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--gamma", type=float, help="superposition phase gamma, radians")
    group.add_argument("--gamma-deg", dest="gamma_deg", type=float, help="gamma in degrees")
    parser.add_argument("--beta", type=float, help="quasi-momentum beta in [0, 1)")
    parser.add_argument("--kicks", type=int, help="number of kicks q_max")


def _add_output_flags(parser):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--output", "-o", help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    parser.add_argument("--seed", type=int, help="seed recorded in metadata / used by montecarlo")
    parser.add_argument("--threads", type=int, help="parallelism hint (or RATCHET_THREADS)")


def build_parser() -> _Parser:
    parser = _Parser(prog="rotor-ratchet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("scaling-curve", help="pendulum scaling function F(x) and F(x)/x")
    p.add_argument("--x-max", dest="x_max", type=float, default=20.0)
    p.add_argument("--steps", type=int, default=401)
    p.add_argument("--quad-n", dest="quad_n", type=int, default=1024)
    p.add_argument("--dt", type=float, default=1e-3)
    _add_output_flags(p)

    p = sub.add_parser("ratchet", help="single ratchet trajectory (map or quantum engine)")
    _add_param_flags(p)
    p.add_argument("--engine", choices=("eclassical", "quantum"))
    p.add_argument("--mode", choices=("theory", "physical"), default="theory")
    p.add_argument("--scheme", choices=("quadrature", "montecarlo"), default="quadrature")
    p.add_argument("--ensemble-n", dest="ensemble_n", type=int)
    p.add_argument("--basis-halfwidth", dest="basis_halfwidth", type=int)
    _add_output_flags(p)

    p = sub.add_parser("quantum", help="quantum momentum distributions per kick")
    _add_param_flags(p)
    p.add_argument("--basis-halfwidth", dest="basis_halfwidth", type=int)
    _add_output_flags(p)

    p = sub.add_parser("tau-scan", help="quantum crossover grid over pulse periods")
    p.add_argument("--taus", help="comma-separated tau rows in (0, 2pi]")
    p.add_argument("--tau-min", dest="tau_min", type=float)
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p.add_argument("--tau-rows", dest="tau_rows", type=int)
    _add_param_flags(p, need_epsilon=False)
    p.add_argument("--basis-halfwidth", dest="basis_halfwidth", type=int)
    _add_output_flags(p)

    p = sub.add_parser("collapse", help="scaled-current collapse suite over (phi_d, epsilon) combos")
    p.add_argument("--combos", help="comma-separated phi:eps[:gamma] combos")
    _add_param_flags(p, need_epsilon=False)
    p.add_argument("--ell", type=int)
    p.add_argument("--engine", choices=("eclassical", "quantum", "pendulum"))
    p.add_argument("--mode", choices=("theory", "physical"), default="theory")
    p.add_argument("--ensemble-n", dest="ensemble_n", type=int)
    p.add_argument("--basis-halfwidth", dest="basis_halfwidth", type=int)
    _add_output_flags(p)

    p = sub.add_parser("energy-collapse", help="scaled mean-energy collapse over combos")
    p.add_argument("--combos", help="comma-separated phi:eps[:gamma] combos")
    _add_param_flags(p, need_epsilon=False)
    p.add_argument("--ell", type=int)
    p.add_argument("--mode", choices=("theory", "physical"), default="theory")
    p.add_argument("--ensemble-n", dest="ensemble_n", type=int)
    _add_output_flags(p)

    return parser


def _merge_config(args) -> None:
    """Apply config-file values under the command line (flags win)."""
    if not getattr(args, "config", None):
        return
    config = load_config(args.config)
    for key, value in config.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _resolved_gamma(args, default=-math.pi / 2) -> float:
    if getattr(args, "gamma_deg", None) is not None:
        return math.radians(args.gamma_deg)
    if getattr(args, "gamma", None) is not None:
        return args.gamma
    return default


def _build_params(args) -> KickParams:
    try:
        return KickParams(
            ell=args.ell if args.ell is not None else 1,
            epsilon=args.epsilon if args.epsilon is not None else 0.18,
            phi_d=args.phi_d if args.phi_d is not None else 1.8,
            gamma=_resolved_gamma(args),
            beta=args.beta if args.beta is not None else 0.5,
            kicks=args.kicks if args.kicks is not None else 20,
        )
    except ValueError as err:
        raise UsageError(str(err)) from err


def _parse_combos(text: str) -> tuple:
    combos = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(":")
        if len(pieces) not in (2, 3):
            raise UsageError(f"bad combo {part!r}: expected phi:eps or phi:eps:gamma")
        try:
            combos.append(tuple(float(p) for p in pieces))
        except ValueError as err:
            raise UsageError(f"bad combo {part!r}: {err}") from err
    if not combos:
        raise UsageError("no combos given")
    return tuple(combos)


def _parse_taus(args) -> tuple:
    if getattr(args, "taus", None):
        try:
            taus = tuple(float(t) for t in args.taus.split(",") if t.strip())
        except ValueError as err:
            raise UsageError(f"bad --taus list: {err}") from err
    elif args.tau_min is not None and args.tau_max is not None and args.tau_rows:
        if args.tau_rows < 1:
            raise UsageError("--tau-rows must be positive")
        step = (args.tau_max - args.tau_min) / max(args.tau_rows - 1, 1)
        taus = tuple(args.tau_min + i * step for i in range(args.tau_rows))
    else:
        raise UsageError("tau-scan needs --taus or --tau-min/--tau-max/--tau-rows")
    if not taus:
        raise UsageError("no tau rows given")
    return taus


def _check_output_path(path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise UsageError(f"output directory does not exist: {directory}")
    if not os.access(directory, os.W_OK):
        raise UsageError(f"output directory is not writable: {directory}")


def _emit(path: str, fmt: str, csv_text: str, json_text: str) -> None:
    atomic_write_text(path, json_text if fmt == "json" else csv_text)


def _sweep_spec(args, engine: str, combos=(), taus=()) -> SweepSpec:
    try:
        return SweepSpec(
            engine=engine,
            combos=combos,
            taus=taus,
            phi_d=args.phi_d if args.phi_d is not None else 1.8,
            ell=getattr(args, "ell", None) if getattr(args, "ell", None) is not None else 1,
            gamma=_resolved_gamma(args),
            beta=args.beta if args.beta is not None else 0.5,
            kicks=args.kicks if args.kicks is not None else 20,
            mode=getattr(args, "mode", "theory"),
            ensemble_n=args.ensemble_n if getattr(args, "ensemble_n", None) else 1024,
            basis_halfwidth=getattr(args, "basis_halfwidth", None),
            seed=args.seed if args.seed is not None else 0,
            parallelism=resolve_workers(args.threads),
        )
    except ValueError as err:
        raise UsageError(str(err)) from err


def run_command(args) -> int:
    output = args.output or DEFAULT_OUTPUTS[args.command]
    fmt = args.format or "csv"
    _check_output_path(output)

    if args.command == "scaling-curve":
        if args.x_max <= 0:
            raise UsageError("x-max must be positive")
        if args.steps < 2:
            raise UsageError("steps must be at least 2")
        points = scaling_curve(args.x_max, args.steps, args.quad_n, args.dt)
        _emit(
            output,
            fmt,
            scaling_points_to_csv(points),
            table_to_json(SCALING_HEADER, scaling_points_to_rows(points)),
        )

    elif args.command == "ratchet":
        params = _build_params(args)
        engine = args.engine or "eclassical"
        if engine == "quantum":
            traj = evolve_quantum(params, basis_halfwidth=args.basis_halfwidth)
        else:
            ensemble = build_ratchet_ensemble(
                params,
                n=args.ensemble_n or 1024,
                mode=args.mode,
                scheme=args.scheme,
                seed=args.seed,
            )
            traj = evolve_map(ensemble, params, partitions=resolve_workers(args.threads))
        _emit(output, fmt, traj.to_csv(), table_to_json(
            ("q", "x", "mean_p", "mean_energy", "scaled_current"), traj.to_rows()
        ))

    elif args.command == "quantum":
        params = _build_params(args)
        _, distributions = evolve_quantum(
            params, basis_halfwidth=args.basis_halfwidth, record_distributions=True
        )
        _emit(
            output,
            fmt,
            distributions_to_csv(distributions),
            table_to_json(DISTRIBUTION_HEADER, distributions_to_rows(distributions)),
        )

    elif args.command == "tau-scan":
        spec = _sweep_spec(args, "quantum", taus=_parse_taus(args))
        grid = run_tau_scan(spec)
        _emit(output, fmt, grid.to_csv(), grid.to_json())

    elif args.command == "collapse":
        if not args.combos:
            raise UsageError("collapse needs --combos")
        spec = _sweep_spec(args, args.engine or "eclassical", combos=_parse_combos(args.combos))
        result = run_collapse_suite(spec)
        _emit(output, fmt, result.to_csv(), result.to_json())

    elif args.command == "energy-collapse":
        if not args.combos:
            raise UsageError("energy-collapse needs --combos")
        spec = _sweep_spec(args, "eclassical", combos=_parse_combos(args.combos))
        result = run_energy_collapse(spec)
        _emit(output, fmt, result.to_csv(), result.to_json())

    else:
        raise UsageError("missing command")

    print(output, file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        _merge_config(args)
        return run_command(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (LeakageError, ValueError, ArithmeticError) as err:
        print(f"engine error: {err}", file=sys.stderr)
        return EXIT_ENGINE
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
