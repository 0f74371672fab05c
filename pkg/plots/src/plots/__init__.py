"""Figure rendering for cup-game experiment artifacts."""

from .render import KINDS, PlotError, PlotSpec, SchemaError, build_figure, render

__all__ = ["KINDS", "PlotError", "PlotSpec", "SchemaError", "build_figure",
           "render"]
