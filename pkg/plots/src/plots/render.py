"""Turn experiment artifacts into figures.

Reads only the published file contracts: results.csv rows of
(trial, step, metric, value_num, value_den) and summary.json documents.
Rendering is a pure function of the input bytes; the style is pinned so
re-rendering identical inputs yields identical image files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from cycler import cycler  # noqa: E402

__all__ = ["PlotSpec", "PlotError", "SchemaError", "render", "KINDS"]

KINDS = ("series", "scatter-vs-n", "per-phase-bars")

CSV_COLUMNS = ("trial", "step", "metric", "value_num", "value_den")

# Everything the figure's bytes depend on is fixed here; fonts are the
# ones bundled with matplotlib.
_STYLE = {
    "figure.figsize": (8.0, 5.0),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 11.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.prop_cycle": cycler(color=[
        "#00429d", "#93003a", "#2e8b57", "#ff7f0e", "#6a51a3",
        "#1f77b4", "#8c564b", "#d62728",
    ]),
}

_PNG_METADATA = {"Software": "cupgames-plots"}


class PlotError(Exception):
    """Unrenderable request; the message says why."""


class SchemaError(PlotError):
    """Input file does not match the published contract."""


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input artifacts, figure kind, labels, destination.

    ``series`` and ``per-phase-bars`` take one results.csv;
    ``scatter-vs-n`` takes one or more summary.json files. ``metric``
    picks the results.csv rows a series plots.
    """

    inputs: tuple
    kind: str
    out: str
    metric: str = "tail_size"
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(
                f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not self.inputs:
            raise PlotError("no input files given")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        if self.kind != "scatter-vs-n" and len(self.inputs) != 1:
            raise PlotError(f"kind {self.kind!r} takes exactly one results.csv")
        if not str(self.out).endswith(".png"):
            raise PlotError("output path must end in .png")


# ------------------------------------------------------------ input readers


def _read_results(path: str) -> list[dict]:
    """Rows of a results.csv with values as Fractions."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as e:
        raise PlotError(f"cannot read {path}: {e.strerror}") from None
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or ()
        for col in CSV_COLUMNS:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r}")
        rows = []
        for rec in reader:
            try:
                rows.append({
                    "trial": int(rec["trial"]),
                    "step": int(rec["step"]),
                    "metric": rec["metric"],
                    "value": Fraction(int(rec["value_num"]),
                                      int(rec["value_den"])),
                })
            except (TypeError, ValueError) as e:
                raise SchemaError(f"{path}: bad row {reader.line_num}: {e}") from None
    if not rows:
        raise PlotError(f"{path}: no data rows")
    return rows


def _read_summary(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise PlotError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: not valid JSON: {e}") from None
    for key in ("key", "aggregates"):
        if key not in doc:
            raise SchemaError(f"{path}: missing field {key!r}")
    if "n" not in doc["key"]:
        raise SchemaError(f"{path}: missing field 'key.n'")
    return doc


def _metric_rows(rows: list[dict], metric: str, path: str) -> list[dict]:
    picked = [r for r in rows if r["metric"] == metric]
    if not picked:
        have = sorted({r["metric"] for r in rows})
        raise SchemaError(
            f"{path}: no rows for metric {metric!r} (file has: {', '.join(have)})")
    return picked


# ------------------------------------------------------------ figures


def _series_figure(spec: PlotSpec):
    rows = _metric_rows(_read_results(spec.inputs[0]), spec.metric,
                        spec.inputs[0])
    by_trial: dict[int, list] = {}
    for r in rows:
        by_trial.setdefault(r["trial"], []).append((r["step"], float(r["value"])))
    fig, ax = plt.subplots()
    for trial in sorted(by_trial):
        pts = sorted(by_trial[trial])
        ax.plot([x for x, _ in pts], [y for _, y in pts],
                linewidth=1.2, label=f"trial {trial}")
    ax.set_xlabel(spec.xlabel or "step")
    ax.set_ylabel(spec.ylabel or spec.metric)
    if len(by_trial) <= 12:
        ax.legend(loc="upper left", fontsize=9)
    return fig


def _scatter_figure(spec: PlotSpec):
    points = []
    for path in spec.inputs:
        doc = _read_summary(path)
        agg = doc["aggregates"]
        if "max_tail" not in agg:
            raise SchemaError(f"{path}: missing field 'aggregates.max_tail'")
        num, den = agg["max_tail"]["max"]
        points.append((int(doc["key"]["n"]), num / den))
    points.sort()
    fig, ax = plt.subplots()
    ax.set_xscale("log", base=2)
    ax.scatter([x for x, _ in points], [y for _, y in points],
               s=36, zorder=3)
    ax.set_xlabel(spec.xlabel or "cups (n)")
    ax.set_ylabel(spec.ylabel or "max tail size")
    return fig


def _bars_figure(spec: PlotSpec):
    rows = _metric_rows(_read_results(spec.inputs[0]), "wasted_steps",
                        spec.inputs[0])
    # phase index = rank of the phase-end step the runner stamped the row with
    ends = sorted({r["step"] for r in rows})
    phase_of = {s: i + 1 for i, s in enumerate(ends)}
    sums: dict[int, Fraction] = {}
    counts: dict[int, int] = {}
    for r in rows:
        ph = phase_of[r["step"]]
        sums[ph] = sums.get(ph, Fraction(0)) + r["value"]
        counts[ph] = counts.get(ph, 0) + 1
    phases = sorted(sums)
    means = [float(sums[ph] / counts[ph]) for ph in phases]
    fig, ax = plt.subplots()
    ax.bar(phases, means, width=0.7)
    ax.set_xticks(phases)
    ax.set_xlabel(spec.xlabel or "phase")
    ax.set_ylabel(spec.ylabel or "emptier-wasted steps (mean over trials)")
    return fig


_BUILDERS = {
    "series": _series_figure,
    "scatter-vs-n": _scatter_figure,
    "per-phase-bars": _bars_figure,
}


def build_figure(spec: PlotSpec):
    """The figure for a spec, before file output. Callers own closing it."""
    with matplotlib.rc_context(_STYLE):
        return _BUILDERS[spec.kind](spec)


def render(spec: PlotSpec) -> str:
    """Draw the figure and write it to spec.out. Returns the output path."""
    with matplotlib.rc_context(_STYLE):
        fig = _BUILDERS[spec.kind](spec)
        try:
            Path(spec.out).parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(spec.out, metadata=dict(_PNG_METADATA))
        finally:
            plt.close(fig)
    return spec.out
