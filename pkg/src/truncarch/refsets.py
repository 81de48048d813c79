"""Reference lattices, front samplers, and arrival-sequence construction."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Solution

FRONT_KINDS = ("simplex", "inverted")


def das_dennis(m: int, divisions: int) -> np.ndarray:
    """Das-Dennis simplex lattice: all non-negative integer compositions of
    `divisions` into m parts, scaled to sum 1, in lexicographic order."""
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    if divisions < 1:
        raise ValueError(f"need divisions >= 1, got {divisions}")
    rows: list[list[int]] = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 1:
            rows.append(prefix + [left])
            return
        for k in range(left + 1):
            rec(prefix + [k], left - k, slots - 1)

    rec([], divisions, m)
    return np.array(rows, dtype=float) / divisions


def das_dennis_count(m: int, divisions: int) -> int:
    return math.comb(divisions + m - 1, m - 1)


def divisions_for(m: int, count: int) -> int:
    """Lattice divisions producing exactly `count` vectors, or ValueError."""
    d = 1
    while das_dennis_count(m, d) < count:
        d += 1
    if das_dennis_count(m, d) != count:
        raise ValueError(f"no Das-Dennis lattice with {count} vectors for m={m}")
    return d


def invert_simplex(points) -> np.ndarray:
    """Mirror simplex points: z -> (1 - z_1, ..., 1 - z_m); sums become m - 1."""
    pts = np.asarray(points, dtype=float)
    return 1.0 - pts


def igd_reference_set(kind: str, m: int = 3, divisions: int = 99) -> np.ndarray:
    """Dense lattice used as the IGD reference set for a front kind."""
    _check_kind(kind)
    base = das_dennis(m, divisions)
    return invert_simplex(base) if kind == "inverted" else base


def _check_kind(kind: str):
    if kind not in FRONT_KINDS:
        raise ValueError(f"unknown front kind {kind!r}, expected one of {FRONT_KINDS}")


def sample_front(kind: str, n: int, seed: int, m: int = 3) -> np.ndarray:
    """Sample n points uniformly on the front.

    Uniform simplex points come from the spacings method: sort m-1 uniforms
    and take consecutive gaps. The inverted front mirrors each point.
    """
    _check_kind(kind)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = np.sort(rng.random((n, m - 1)), axis=1)
    padded = np.column_stack([np.zeros(n), u, np.ones(n)])
    pts = np.diff(padded, axis=1)
    if kind == "inverted":
        pts = invert_simplex(pts)
    return pts


@dataclass(frozen=True, slots=True)
class InputSequence:
    """A shuffled stream of solutions chopped into arrival batches.

    Solution ids are positions in the unshuffled base sample, so different
    shuffles of the same base set permute the same ids. Seeds of -1 mark
    sequences read back from disk (the file format does not store them).
    """

    front_kind: str
    base_seed: int
    shuffle_seed: int
    batches: tuple[tuple[Solution, ...], ...]

    @property
    def n_solutions(self) -> int:
        return sum(len(b) for b in self.batches)

    def all_solutions(self) -> list[Solution]:
        return [s for b in self.batches for s in b]


def _front_sum(kind: str, m: int) -> float:
    return float(m - 1) if kind == "inverted" else 1.0


def _slice_batches(solutions: list[Solution], batch_size: int | None):
    if batch_size is None:
        return (tuple(solutions),)
    if batch_size < 1:
        raise ValueError(f"batch size must be >= 1, got {batch_size}")
    return tuple(
        tuple(solutions[i : i + batch_size])
        for i in range(0, len(solutions), batch_size)
    )


def build_sequence(
    front_kind: str,
    n: int,
    base_seed: int,
    shuffle_seed: int,
    batch_size: int | None = None,
    m: int = 3,
) -> InputSequence:
    """Sample a base set, shuffle it, and slice into batches.

    The base set depends only on (front_kind, n, base_seed, m); the shuffle
    permutes arrival order without changing ids or vectors.
    """
    pts = sample_front(front_kind, n, base_seed, m)
    order = np.random.default_rng(shuffle_seed).permutation(n)
    solutions = [Solution(int(i), tuple(pts[i])) for i in order]
    return InputSequence(
        front_kind=front_kind,
        base_seed=base_seed,
        shuffle_seed=shuffle_seed,
        batches=_slice_batches(solutions, batch_size),
    )


def rebatch(seq: InputSequence, batch_size: int | None) -> InputSequence:
    """Same solutions in the same arrival order, new batch boundaries."""
    return InputSequence(
        front_kind=seq.front_kind,
        base_seed=seq.base_seed,
        shuffle_seed=seq.shuffle_seed,
        batches=_slice_batches(seq.all_solutions(), batch_size),
    )


# -- file formats (17 significant digits: exact float round-trip) ---------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_sequence(seq: InputSequence, path):
    path = Path(path)
    m = len(seq.batches[0][0].objectives) if seq.n_solutions else 0
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + [f"f{i + 1}" for i in range(m)] + ["batch"])
        for b, batch in enumerate(seq.batches):
            for s in batch:
                w.writerow([s.id] + [_fmt(v) for v in s.objectives] + [b])


def read_sequence(path) -> InputSequence:
    """Read a sequence file; front kind is inferred from coordinate sums."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "id" or rows[0][-1] != "batch":
        raise ValueError(f"{path}: not a sequence file (header {rows[0] if rows else []})")
    m = len(rows[0]) - 2
    batches: list[list[Solution]] = []
    seen: set[int] = set()
    for row in rows[1:]:
        if len(row) != m + 2:
            raise ValueError(f"{path}: malformed row {row}")
        sid = int(row[0])
        if sid in seen:
            raise ValueError(f"{path}: duplicate solution id {sid}")
        seen.add(sid)
        b = int(row[-1])
        if b == len(batches):
            batches.append([])
        elif b != len(batches) - 1:
            raise ValueError(f"{path}: batch indices must be consecutive, got {b}")
        batches[-1].append(Solution(sid, tuple(float(v) for v in row[1:-1])))
    if not batches:
        raise ValueError(f"{path}: sequence file has no rows")
    sums = np.array([sum(s.objectives) for b in batches for s in b])
    kind = None
    for k in FRONT_KINDS:
        if np.abs(sums - _front_sum(k, m)).max() < 1e-6:
            kind = k
            break
    if kind is None:
        raise ValueError(f"{path}: points do not lie on a known front kind")
    return InputSequence(
        front_kind=kind,
        base_seed=-1,
        shuffle_seed=-1,
        batches=tuple(tuple(b) for b in batches),
    )


def write_reference_set(points, path):
    pts = np.asarray(points, dtype=float)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{i + 1}" for i in range(pts.shape[1])])
        for row in pts:
            w.writerow([_fmt(v) for v in row])


def read_reference_set(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "f1":
        raise ValueError(f"{path}: not a reference-set file")
    return np.array([[float(v) for v in row] for row in rows[1:]])
