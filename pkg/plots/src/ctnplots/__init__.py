"""Figure rendering for the entanglement-cooling simulator's CSV output."""

from .data import (EmptyDataError, SchemaError, fit_line, growth_rates,
                   load_fidelities, load_trajectories, page_bound)
from .render import KINDS, PlotSpec, render

__all__ = ["EmptyDataError", "SchemaError", "fit_line", "growth_rates",
           "load_fidelities", "load_trajectories", "page_bound",
           "KINDS", "PlotSpec", "render"]

__version__ = "0.1.0"
