"""Publication-style figures from dnls run artifacts.

This package never imports the solver. It reads the CSV and JSON files a
finished run leaves behind, checks them against the run's manifest, and
draws. Four figure kinds are supported; see `dnls_plot.figures.KINDS`.
"""

from .artifacts import ArtifactDir, ArtifactError, open_artifacts
from .figures import KINDS, FigureSpec, StyleOptions, build_figure, render

__all__ = [
    "ArtifactDir",
    "ArtifactError",
    "open_artifacts",
    "KINDS",
    "FigureSpec",
    "StyleOptions",
    "build_figure",
    "render",
]
