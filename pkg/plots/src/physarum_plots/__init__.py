"""Render PNG figures from physarum-lp experiment CSVs."""

from .render import PlotSpec, render

__all__ = ["PlotSpec", "render"]
__version__ = "0.1.0"
