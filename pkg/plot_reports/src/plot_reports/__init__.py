"""Figure rendering for qse-decode CSV sweep outputs."""

from .render import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render"]
