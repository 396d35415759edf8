"""Shift-of-argument integrable systems on sl_n and codimension certificates
for their bifurcation diagrams."""

__version__ = "0.1.0"

from .argshift import ShiftSystem, eval_F, grad_F, jacobian_F, new_shift_system
from .bifurcation import certify_codim, make_shift, verify_theorem
from .liealg import algebra

__all__ = [
    "__version__",
    "ShiftSystem",
    "algebra",
    "certify_codim",
    "eval_F",
    "grad_F",
    "jacobian_F",
    "make_shift",
    "new_shift_system",
    "verify_theorem",
]
