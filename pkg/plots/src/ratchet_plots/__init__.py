"""Figure rendering for rotor-ratchet CSV outputs."""

from .csvio import SchemaError
from .render import PLOT_KINDS, PlotJob, render

__version__ = "0.1.0"

__all__ = ["PLOT_KINDS", "PlotJob", "SchemaError", "render", "__version__"]
