"""A small closed language of analytic functions of one variable.

Grammar, node types and rendering live in :mod:`.nodes` and :mod:`.parser`;
:mod:`.calculus` differentiates, :mod:`.evaluate` computes values, images of
finite sets and monotonicity pieces.
"""

from .calculus import (
    DiscreteDerivativeSpec, derivative, differentiate, discrete_derivative,
    normalize_polynomial, polynomial, polynomial_coefficients, simplify, substitute,
)
from .evaluate import (
    CompiledFunction, Interval, compile_function, derivative_signs, evaluate, evaluate_exact,
    image, monotone_partition,
)
from .nodes import (
    FUNCTIONS, Add, Arctan, Const, Cos, Div, Exp, Expr, Log, Mul, Pow, Sin, Sub, Var, X,
    has_partial, is_polynomial, is_rational_function, render,
)
from .parser import parse

__all__ = [
    "Add", "Arctan", "CompiledFunction", "Const", "Cos", "DiscreteDerivativeSpec", "Div",
    "Exp", "Expr", "FUNCTIONS", "Interval", "Log", "Mul", "Pow", "Sin", "Sub", "Var", "X",
    "compile_function", "derivative", "derivative_signs", "differentiate",
    "discrete_derivative", "evaluate", "evaluate_exact", "has_partial", "image",
    "is_polynomial", "is_rational_function", "monotone_partition", "normalize_polynomial", "parse", "polynomial",
    "polynomial_coefficients", "render",
    "simplify", "substitute",
]
