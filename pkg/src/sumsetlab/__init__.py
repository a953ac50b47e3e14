"""Exact iterated sumsets, squeezing witnesses and growth checks for convex sets."""

from .errors import SumsetLabError
from .sets import (
    FiniteSet,
    SignedSumSpec,
    consecutive_differences,
    convexity_order,
    interval_count,
    n_k_count,
    read_set,
    sumset,
)

__version__ = "0.1.0"

__all__ = [
    "FiniteSet",
    "SignedSumSpec",
    "SumsetLabError",
    "consecutive_differences",
    "convexity_order",
    "interval_count",
    "n_k_count",
    "read_set",
    "sumset",
]
