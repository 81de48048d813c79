"""Value types and Pareto dominance for multi-objective archives.

Objectives are minimized. Dominance is exact (no epsilon): a vector dominates
another iff it is no worse in every component and not equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


def objective_vector(values: Iterable[float]) -> tuple[float, ...]:
    """Validate and freeze an objective vector (m >= 2, all finite floats)."""
    vec = tuple(float(v) for v in values)
    if len(vec) < 2:
        raise ValueError(f"objective vector needs >= 2 components, got {len(vec)}")
    for v in vec:
        if not math.isfinite(v):
            raise ValueError(f"objective vector has non-finite component: {vec}")
    return vec


@dataclass(frozen=True, slots=True)
class Solution:
    """An immutable solution: a non-negative id plus its objective vector."""

    id: int
    objectives: tuple[float, ...]

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"solution id must be non-negative, got {self.id}")
        object.__setattr__(self, "objectives", objective_vector(self.objectives))


@dataclass(frozen=True, slots=True)
class Front:
    """One dominance-depth layer; members keep their input order."""

    rank: int
    members: tuple[Solution, ...]


@dataclass(frozen=True, slots=True)
class Archive:
    """A bounded set of solutions (|members| <= capacity)."""

    capacity: int
    members: tuple[Solution, ...]

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"archive capacity must be >= 1, got {self.capacity}")
        if len(self.members) > self.capacity:
            raise ValueError(
                f"archive holds {len(self.members)} members, capacity {self.capacity}"
            )

    def __len__(self) -> int:
        return len(self.members)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff a Pareto-dominates b (a <= b componentwise and a != b)."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def stack(solutions: Sequence[Solution]) -> tuple[np.ndarray, np.ndarray]:
    """Solutions -> ((n, m) float64 objectives, (n,) int64 ids), input order."""
    n = len(solutions)
    if n == 0:
        return np.empty((0, 0)), np.empty(0, dtype=np.int64)
    m = len(solutions[0].objectives)
    pts = np.empty((n, m))
    ids = np.empty(n, dtype=np.int64)
    for i, s in enumerate(solutions):
        if len(s.objectives) != m:
            raise ValueError("solutions mix objective dimensions")
        pts[i] = s.objectives
        ids[i] = s.id
    return pts, ids


def nondominated_filter(solutions: Sequence[Solution]) -> list[Solution]:
    """Keep the non-dominated solutions, preserving input order.

    Duplicate vectors are all kept: a copy does not dominate its twin.
    """
    if len(solutions) <= 1:
        return list(solutions)
    pts, _ = stack(solutions)
    mask = _kernels.nondominated_mask(pts)
    return [s for s, keep in zip(solutions, mask) if keep]


def fast_nondominated_sort(solutions: Sequence[Solution]) -> list[Front]:
    """Partition into fronts by dominance depth (rank 0 = non-dominated)."""
    if not solutions:
        return []
    pts, _ = stack(solutions)
    depth = _kernels.dominance_depth(pts)
    fronts: list[Front] = []
    for rank in range(int(depth.max()) + 1):
        members = tuple(s for s, d in zip(solutions, depth) if d == rank)
        fronts.append(Front(rank=rank, members=members))
    return fronts
