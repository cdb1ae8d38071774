"""Deterministic text output and schema-checked CSV parsing.

All emitters route floats through :func:`format_float` (12 significant
digits) and write files atomically (temp file in the target directory, then
rename), so a failed run never leaves a partial file and identical inputs
produce identical bytes.
"""

from __future__ import annotations

import json
import os
import tempfile


def format_float(value: float) -> str:
    """Format a float with at most 12 significant digits."""
    return "%.12g" % float(value)


def format_cell(value) -> str:
    """CSV cell: empty for None, %.12g for floats, str for ints."""
    if value is None:
        return ""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format_float(value)


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temporary file and an atomic rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def table_to_csv(header, rows, comments=()) -> str:
    """Assemble a CSV with optional '#'-prefixed metadata comment lines."""
    lines = ["# " + c for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def table_to_json(header, rows, metadata=None) -> str:
    """JSON mirror of a CSV table: column names plus row arrays."""
    payload = {"columns": list(header), "rows": [list(r) for r in rows]}
    if metadata:
        payload["metadata"] = dict(metadata)
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def parse_csv_text(text: str):
    """Split CSV text into (comments, header, rows of str cells)."""
    comments = []
    data_lines = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            data_lines.append(line)
    if not data_lines:
        raise ValueError("CSV has no header line")
    header = tuple(data_lines[0].split(","))
    rows = [line.split(",") for line in data_lines[1:]]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("CSV row width does not match the header")
    return comments, header, rows


def _typed(cell: str):
    if cell == "":
        return None
    return float(cell)


def read_table(path: str, expected_header) -> tuple[list[str], list[list]]:
    """Read a CSV file, check its header, and return (comments, typed rows)."""
    with open(path) as handle:
        comments, header, rows = parse_csv_text(handle.read())
    if tuple(header) != tuple(expected_header):
        raise ValueError(
            f"unexpected CSV header {','.join(header)!r}; "
            f"expected {','.join(expected_header)!r}"
        )
    return comments, [[_typed(c) for c in row] for row in rows]


TRAJECTORY_COLUMNS = ("q", "x", "mean_p", "mean_energy", "scaled_current")
SCALING_COLUMNS = ("x", "F", "F_over_x")
DISTRIBUTION_COLUMNS = ("q", "p", "prob")
GRID_COLUMNS = ("tau", "ell_star", "epsilon", "q", "x", "scaled_current")
COLLAPSE_COLUMNS = ("phi_d", "epsilon", "gamma", "q", "x", "scaled_current")
ENERGY_COLUMNS = ("phi_d", "epsilon", "gamma", "q", "x", "scaled_energy")


def read_trajectory_csv(path: str):
    return read_table(path, TRAJECTORY_COLUMNS)


def read_scaling_csv(path: str):
    return read_table(path, SCALING_COLUMNS)


def read_distribution_csv(path: str):
    return read_table(path, DISTRIBUTION_COLUMNS)


def read_grid_csv(path: str):
    return read_table(path, GRID_COLUMNS)


def read_collapse_csv(path: str):
    return read_table(path, COLLAPSE_COLUMNS)


def read_energy_csv(path: str):
    return read_table(path, ENERGY_COLUMNS)
