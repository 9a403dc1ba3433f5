"""Plots throughput/SEP curves from twopath sweep CSVs.

This package deliberately has no import dependency on the simulator: it
consumes only the documented CSV schema, so figure regeneration works on any
archived results file.
"""

from .render import (
    HARNESS_COLUMNS,
    EmptyData,
    FigureSpec,
    RenderError,
    RenderResult,
    SchemaMismatch,
    Series,
    load_rows,
    render,
)

__version__ = "0.1.0"
