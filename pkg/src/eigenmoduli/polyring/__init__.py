"""Exact multivariate polynomial arithmetic and Groebner bases over Q."""
from .groebner import (DEFAULT_BUDGET, BudgetExceeded, GroebnerStats, buchberger, eliminate,
                       is_groebner, is_reduced_groebner, normal_form, s_polynomial)
from .mpoly import ArityError, MPoly, evaluate, relative_residual, residual
from .orders import GREVLEX, LEX, MonomialOrder, block_order

__all__ = [
    "ArityError", "BudgetExceeded", "DEFAULT_BUDGET", "GREVLEX", "GroebnerStats", "LEX", "MPoly",
    "MonomialOrder", "block_order", "buchberger", "eliminate", "evaluate", "is_groebner",
    "is_reduced_groebner", "normal_form", "relative_residual", "residual", "s_polynomial",
]
