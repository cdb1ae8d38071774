"""Figure renderers for the three report kinds.

Rendering is read-only and deterministic: fixed figure geometry, axis
ranges derived from the data, no timestamps.  The heatmap uses a diverging
colormap on a symmetric range so the sign of the current is visually
meaningful, with inversion regions in blue.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import (
    COLLAPSE_HEADER,
    DISTRIBUTION_HEADER,
    GRID_HEADER,
    SCALING_HEADER,
    TRAJECTORY_HEADER,
    SchemaError,
    read_checked,
    sniff_header,
)

PLOT_KINDS = ("scaling-overlay", "grid-heatmap", "distribution-waterfall")

FIGSIZE = (7.0, 4.6)
DPI = 150

CURRENT_LABEL = r"$\langle p\rangle / (-\phi_d\, q\, \sin\gamma)$"


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"kind must be one of {PLOT_KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def render(job: PlotJob) -> str:
    """Render the job to its output image path and return that path."""
    if job.kind == "scaling-overlay":
        fig = _scaling_overlay(job.inputs)
    elif job.kind == "grid-heatmap":
        fig = _grid_heatmap(job.inputs)
    else:
        fig = _distribution_waterfall(job.inputs)
    fig.savefig(job.output, dpi=DPI)
    plt.close(fig)
    return job.output


def _scaling_overlay(inputs):
    """Theory curve F(x)/x with engine points overlaid on top."""
    _, curve_rows = read_checked(inputs[0], SCALING_HEADER)
    xs = np.array([r[0] for r in curve_rows])
    f_over_x = np.array([r[2] for r in curve_rows])

    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.axhline(0.0, color="0.8", lw=0.8)
    ax.plot(xs, f_over_x, "k-", lw=1.5, label="$F(x)/x$")

    for path in inputs[1:]:
        header = sniff_header(path)
        if header == COLLAPSE_HEADER:
            _, rows = read_checked(path, COLLAPSE_HEADER)
            for key, pts in _group_by(rows, lambda r: (r[0], r[1], r[2])).items():
                series = [(r[4], r[5]) for r in pts if r[5] is not None]
                if series:
                    label = rf"$\phi_d={key[0]:g},\ \varepsilon={key[1]:g}$"
                    ax.plot(*zip(*series), "o", ms=4, alpha=0.8, label=label)
        elif header == TRAJECTORY_HEADER:
            _, rows = read_checked(path, TRAJECTORY_HEADER)
            series = [(r[1], r[4]) for r in rows if r[4] is not None]
            if not series:
                raise SchemaError(f"{path}: no defined scaled_current values")
            ax.plot(*zip(*series), "s", ms=4, alpha=0.8, label=path.rsplit("/", 1)[-1])
        else:
            raise SchemaError(
                f"{path}: expected a collapse or trajectory table to overlay, "
                f"got header {','.join(header)!r}"
            )

    ax.set_xlim(float(xs.min()), float(xs.max()))
    ax.set_xlabel("$x$")
    ax.set_ylabel(CURRENT_LABEL)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def _grid_heatmap(inputs):
    """Pulse period against x, scaled current on a zero-centered color axis."""
    if len(inputs) != 1:
        raise SchemaError("grid-heatmap takes exactly one tau-scan CSV")
    _, rows = read_checked(inputs[0], GRID_HEADER)

    by_tau = _group_by(rows, lambda r: r[0])
    taus = sorted(by_tau)
    x_rows, c_rows = [], []
    kept_taus = []
    for tau in taus:
        cells = [(r[4], r[5]) for r in by_tau[tau] if r[4] is not None]
        if not cells:  # resonance-exact row, x undefined
            continue
        kept_taus.append(tau)
        x_rows.append([x for x, _ in cells])
        c_rows.append([np.nan if v is None else v for _, v in cells])
    if not kept_taus:
        raise SchemaError(f"{inputs[0]}: every row has undefined x")
    width = len(x_rows[0])
    if any(len(r) != width for r in x_rows):
        raise SchemaError(f"{inputs[0]}: rows have unequal kick counts")

    X = np.array(x_rows)
    C = np.ma.masked_invalid(np.array(c_rows))
    Y = np.repeat(np.array(kept_taus)[:, None], width, axis=1)
    bound = float(np.abs(C).max()) if C.count() else 1.0
    bound = bound or 1.0

    fig, ax = plt.subplots(figsize=FIGSIZE)
    mesh = ax.pcolormesh(
        X, Y, C, cmap="RdBu_r", vmin=-bound, vmax=bound, shading="nearest"
    )
    ax.set_xlabel("$x$")
    ax.set_ylabel(r"pulse period $\tau$")
    fig.colorbar(mesh, ax=ax, label="scaled mean momentum")
    fig.tight_layout()
    return fig


def _distribution_waterfall(inputs):
    """Momentum distributions stacked by kick number."""
    if len(inputs) != 1:
        raise SchemaError("distribution-waterfall takes exactly one q,p,prob CSV")
    _, rows = read_checked(inputs[0], DISTRIBUTION_HEADER)

    by_q = _group_by(rows, lambda r: r[0])
    qs = sorted(by_q)
    peak = max(r[2] for r in rows)
    scale = 0.85 / peak if peak > 0 else 1.0

    fig, ax = plt.subplots(figsize=FIGSIZE)
    for q in qs:
        pts = sorted((r[1], r[2]) for r in by_q[q])
        p = np.array([a for a, _ in pts])
        prob = np.array([b for _, b in pts])
        ax.fill_between(p, q, q + prob * scale, color="C0", alpha=0.55, lw=0)
        ax.plot(p, q + prob * scale, color="C0", lw=0.8)
    ax.set_xlabel(r"momentum $p$ (units of $\hbar G$)")
    ax.set_ylabel("kick number $q$")
    ax.set_ylim(min(qs) - 0.5, max(qs) + 1.5)
    fig.tight_layout()
    return fig


def _group_by(rows, key):
    groups: dict = {}
    for row in rows:
        groups.setdefault(key(row), []).append(row)
    return groups
