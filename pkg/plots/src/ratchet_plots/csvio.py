"""Readers for the rotor-ratchet CSV interfaces.

This package talks to the simulator only through its documented file
formats; the expected headers below are that interface.  A header mismatch
is a hard :class:`SchemaError`.
"""

from __future__ import annotations

SCALING_HEADER = ("x", "F", "F_over_x")
TRAJECTORY_HEADER = ("q", "x", "mean_p", "mean_energy", "scaled_current")
COLLAPSE_HEADER = ("phi_d", "epsilon", "gamma", "q", "x", "scaled_current")
GRID_HEADER = ("tau", "ell_star", "epsilon", "q", "x", "scaled_current")
DISTRIBUTION_HEADER = ("q", "p", "prob")


class SchemaError(ValueError):
    """Input file does not match the documented CSV schema."""


def read_csv(path: str):
    """Return (comments, header, typed rows); empty cells become None."""
    comments = []
    data = []
    try:
        with open(path) as handle:
            lines = handle.read().splitlines()
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from err
    for line in lines:
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            data.append(line)
    if not data:
        raise SchemaError(f"{path}: no header line")
    header = tuple(data[0].split(","))
    rows = []
    for line in data[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row width does not match the header")
        rows.append([None if c == "" else float(c) for c in cells])
    return comments, header, rows


def read_checked(path: str, expected: tuple[str, ...]):
    """Read a CSV and require an exact header match and at least one row."""
    comments, header, rows = read_csv(path)
    if header != expected:
        raise SchemaError(
            f"{path}: header {','.join(header)!r} does not match the expected "
            f"schema {','.join(expected)!r}"
        )
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return comments, rows


def sniff_header(path: str) -> tuple[str, ...]:
    _, header, _ = read_csv(path)
    return header
