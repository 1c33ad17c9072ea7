"""Figure regeneration from doublewell CSV artifacts (presentation only)."""

from .io import DataError, Table, read_table
from .render import PlotJob, render

__version__ = "0.1.0"

__all__ = ["DataError", "PlotJob", "Table", "read_table", "render",
           "__version__"]
