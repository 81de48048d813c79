"""Bounded multi-objective archives: truncation policies, schedules, benchmarks."""

from .core import (
    Archive,
    Front,
    Solution,
    dominates,
    fast_nondominated_sort,
    nondominated_filter,
    objective_vector,
)

__all__ = [
    "Archive",
    "Front",
    "Solution",
    "dominates",
    "fast_nondominated_sort",
    "nondominated_filter",
    "objective_vector",
]

__version__ = "0.1.0"
