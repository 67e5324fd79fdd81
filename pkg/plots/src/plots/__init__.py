"""Render attnsep sweep CSVs as success-ratio figures.

This package only knows the CSV schema (one row per sweep point):

    family,swept_param,swept_value,trials,successes,ratio,
    fail_exp_d1,fail_lin_d1,fail_exp_d0,fail_lin_d0,seed

Each input file becomes one PNG named ``<family>_<swept_param>.png`` drawn
from the file's own columns (a header-only file falls back to the input
file's stem and renders empty axes).  The y axis is always [0, 1]; there is
exactly one curve per figure and no styling beyond the axis labels.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

EXPECTED_HEADER = [
    "family",
    "swept_param",
    "swept_value",
    "trials",
    "successes",
    "ratio",
    "fail_exp_d1",
    "fail_lin_d1",
    "fail_exp_d0",
    "fail_lin_d0",
    "seed",
]

DPI = 150

__all__ = ["SweepCurve", "load_curve", "build_figure", "render"]


@dataclass(frozen=True)
class SweepCurve:
    family: str
    swept_param: str
    values: tuple[float, ...]
    ratios: tuple[float, ...]

    @property
    def is_empty(self) -> bool:
        return not self.values


def load_curve(path: str | os.PathLike) -> SweepCurve:
    """Parse one sweep CSV; raises ValueError naming the offending row."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != EXPECTED_HEADER:
        raise ValueError(f"{path}, row 1: expected header {','.join(EXPECTED_HEADER)}")
    family, param = "", ""
    values, ratios = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(EXPECTED_HEADER):
            raise ValueError(
                f"{path}, row {lineno}: expected {len(EXPECTED_HEADER)} fields, got {len(row)}"
            )
        try:
            value = float(row[2])
            ratio = float(row[5])
        except ValueError:
            raise ValueError(f"{path}, row {lineno}: non-numeric swept_value/ratio in {row!r}")
        if family and (row[0], row[1]) != (family, param):
            raise ValueError(f"{path}, row {lineno}: mixed sweeps in one file")
        family, param = row[0], row[1]
        values.append(value)
        ratios.append(ratio)
    if not values:
        return SweepCurve(family="", swept_param="", values=(), ratios=())
    return SweepCurve(family, param, tuple(values), tuple(ratios))


def build_figure(curve: SweepCurve):
    """One figure, one curve, y clamped to [0, 1], labels only."""
    fig, ax = plt.subplots()
    if not curve.is_empty:
        ax.plot(curve.values, curve.ratios, marker="o", markersize=3)
        ax.set_xlabel(curve.swept_param)
    ax.set_ylabel("success ratio")
    ax.set_ylim(0.0, 1.0)
    return fig


def render(csv_paths, out_dir: str | os.PathLike) -> list[Path]:
    """Render every CSV to ``out_dir``; returns the written PNG paths.

    Inputs are only ever opened for reading.  Output bytes are stable across
    runs (fixed dpi, no metadata beyond what the library always writes).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for csv_path in csv_paths:
        csv_path = Path(csv_path)
        curve = load_curve(csv_path)
        name = csv_path.stem if curve.is_empty else f"{curve.family}_{curve.swept_param}"
        target = out_dir / f"{name}.png"
        fig = build_figure(curve)
        try:
            fig.savefig(target, dpi=DPI, metadata={"Software": None})
        finally:
            plt.close(fig)
        written.append(target)
    return written
