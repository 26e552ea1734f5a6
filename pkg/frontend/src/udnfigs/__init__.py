"""Deterministic figure rendering for udncoop sweep CSVs."""

__version__ = "0.1.0"

from .figspec import FIGURE_IDS, FIGURES, FigureSpec
from .render import (Curve, RenderError, RenderReport, build_figure,
                     extract_curves, load_rows, render, render_all)

__all__ = [
    "FIGURE_IDS", "FIGURES", "FigureSpec",
    "Curve", "RenderError", "RenderReport",
    "build_figure", "extract_curves", "load_rows", "render", "render_all",
    "__version__",
]
