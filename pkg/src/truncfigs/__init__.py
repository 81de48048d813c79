"""3D scatter figures for archive benchmark results.

Consumes only the runner's plot-data CSV files (never raw archives), and
renders one composite image per (policy, front) pair: three panels for the
immediate / batch / unbounded truncation schedules, each annotated with
the run's IGD value.
"""

from .render import (
    PanelSpec,
    PlotData,
    igd_label,
    read_plot_data,
    render_grid,
    render_panel,
)

__all__ = [
    "PanelSpec",
    "PlotData",
    "igd_label",
    "read_plot_data",
    "render_grid",
    "render_panel",
]
