"""Render sweep CSVs into figures.

Rendering is a pure function of the CSV contents: the same file always
produces the same set of curves (timestamps embedded by image encoders are
the only thing that may differ between runs).
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FIGURE_KINDS = ("threshold", "transversal", "molecule")

_LEVEL_COL = re.compile(r"^l(\d+)$")
_STAR_MEAN_COL = re.compile(r"^l(\d+)_star_mean$")
_LEVEL_FID_COL = re.compile(r"^l(\d+)_fidelity$")


class SchemaError(ValueError):
    """The CSV header does not match the declared figure kind."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    figure_kind: str
    output_image_path: str
    log_y: bool = True

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise ValueError(
                f"figure_kind must be one of {FIGURE_KINDS}, got {self.figure_kind!r}"
            )


def _read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, no header row")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: header only, no data rows")
    return reader.fieldnames, rows


def _require(fieldnames, needed, path):
    for col in needed:
        if col not in fieldnames:
            raise SchemaError(f"{path}: missing required column {col!r}")


def _column(rows, name):
    return [float(row[name]) for row in rows]


def _crossover(ps, encoded, physical):
    """First crossing of the encoded curve above the physical one, interpolated
    in log p / log infidelity. Mirrors the sweep driver's definition."""
    floor = 1e-300
    diffs = [
        math.log(max(e, floor)) - math.log(max(f, floor))
        for e, f in zip(encoded, physical)
    ]
    for i in range(len(ps) - 1):
        if not (math.isfinite(diffs[i]) and math.isfinite(diffs[i + 1])):
            continue
        if diffs[i] < 0.0 <= diffs[i + 1] and ps[i] > 0:
            x0, x1 = math.log(ps[i]), math.log(ps[i + 1])
            t = diffs[i] / (diffs[i] - diffs[i + 1])
            return math.exp(x0 + t * (x1 - x0))
    return None


def _render_sweep(spec: FigureSpec, fieldnames, rows, ax):
    _require(fieldnames, ("p", "physical", "bare"), spec.csv_path)
    levels = sorted(
        int(m.group(1)) for col in fieldnames if (m := _LEVEL_COL.match(col))
    )
    if not levels:
        raise SchemaError(f"{spec.csv_path}: no level columns (l1, l2, ...)")
    ps = _column(rows, "p")
    ax.plot(ps, _column(rows, "bare"), color="0.3", label="bare")
    for level in levels:
        ax.plot(ps, _column(rows, f"l{level}"), label=f"l = {level}")
    star_levels = sorted(
        int(m.group(1)) for col in fieldnames if (m := _STAR_MEAN_COL.match(col))
    )
    for level in star_levels:
        mean = _column(rows, f"l{level}_star_mean")
        ax.plot(ps, mean, linestyle=":", marker="*", markersize=4,
                label=f"l = {level} (drop replicas)")
        if f"l{level}_star_min" in fieldnames and f"l{level}_star_max" in fieldnames:
            ax.fill_between(
                ps,
                _column(rows, f"l{level}_star_min"),
                _column(rows, f"l{level}_star_max"),
                alpha=0.15,
            )
    physical = _column(rows, "physical")
    ax.plot(ps, physical, linestyle="--", color="k", label="physical")
    top = max(levels)
    p_star = _crossover(ps, _column(rows, f"l{top}"), physical)
    if p_star is not None:
        ax.axvline(p_star, color="r", linestyle="-.", linewidth=1)
        ax.annotate(
            f"p* = {p_star:.3f}",
            xy=(p_star, ax.get_ylim()[0]),
            xytext=(5, 10),
            textcoords="offset points",
            color="r",
            fontsize=9,
        )
    ax.set_xlabel("depolarizing probability p")
    ax.set_ylabel("logical infidelity 1 - F_L")
    title = "Pseudo-threshold" if spec.figure_kind == "threshold" else "Transversal X"
    ax.set_title(title)
    if spec.log_y:
        ax.set_yscale("log")
    ax.legend(fontsize=8)


def _render_molecule(spec: FigureSpec, fieldnames, rows, axes):
    _require(
        fieldnames,
        ("p", "bare_fidelity", "bare_infidelity", "improvement_full"),
        spec.csv_path,
    )
    levels = sorted(
        int(m.group(1)) for col in fieldnames if (m := _LEVEL_FID_COL.match(col))
    )
    if not levels:
        raise SchemaError(f"{spec.csv_path}: no level columns (l0_fidelity, ...)")
    ps = _column(rows, "p")
    ax_f, ax_i = axes
    ax_f.plot(ps, _column(rows, "bare_fidelity"), color="0.3", label="bare")
    ax_i.plot(ps, _column(rows, "bare_infidelity"), color="0.3", label="bare")
    for level in levels:
        ax_f.plot(ps, _column(rows, f"l{level}_fidelity"), label=f"l = {level}")
        ax_i.plot(ps, _column(rows, f"l{level}_infidelity"), label=f"l = {level}")
    ax_f.set_xlabel("depolarizing probability p")
    ax_f.set_ylabel("F_L")
    ax_f.set_title("Logical fidelity")
    ax_i.set_xlabel("depolarizing probability p")
    ax_i.set_ylabel("1 - F_L")
    ax_i.set_title("Logical infidelity")
    if spec.log_y:
        ax_i.set_yscale("log")
    ax_f.legend(fontsize=8)
    ax_i.legend(fontsize=8)


def render(spec: FigureSpec):
    """Render the spec's CSV to its output image; returns the Figure."""
    fieldnames, rows = _read_csv(spec.csv_path)
    if spec.figure_kind in ("threshold", "transversal"):
        fig, ax = plt.subplots(figsize=(7, 5))
        _render_sweep(spec, fieldnames, rows, ax)
    else:
        fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
        _render_molecule(spec, fieldnames, rows, axes)
    fig.tight_layout()
    fig.savefig(spec.output_image_path, dpi=150)
    return fig
