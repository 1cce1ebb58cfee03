from .io import SchemaError, meanfield_cube, policy_cube, read_table
from .render import KINDS, FigureSpec, render

__all__ = ["SchemaError", "meanfield_cube", "policy_cube", "read_table",
           "KINDS", "FigureSpec", "render"]
