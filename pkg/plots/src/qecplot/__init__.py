"""Comparison figures for logical-failure curves.

Renders simulated curves (points with error bars) overlaid on analytic
predictions (lines) from the public CSV schema:

    # key=value metadata lines
    cycle,mean_failure,std_error,trials[,source]

This package is deliberately decoupled from the simulator: it consumes CSV
files only.
"""

__version__ = "0.1.0"

from .io import CurveSeries, read_series
from .render import PlotSpec, SeriesSpec, render_overlay, render_scaling_panel
