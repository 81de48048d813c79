"""Quality indicators: exact hypervolume (2D/3D), epsilon, IBEA fitness, IGD, PBI."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import _kernels
from .core import Solution


def as_points(points) -> np.ndarray:
    """Coerce Solutions or vector sequences to an (n, m) float64 array."""
    if isinstance(points, np.ndarray):
        arr = points.astype(float, copy=False)
    else:
        seq = list(points)
        if seq and isinstance(seq[0], Solution):
            arr = np.array([s.objectives for s in seq], dtype=float)
        else:
            arr = np.asarray(seq, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, arr.shape[1] if arr.ndim == 2 else 0)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D point array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("points contain non-finite values")
    return arr


def _check_ref(pts: np.ndarray, ref) -> np.ndarray:
    r = np.asarray(ref, dtype=float)
    if r.shape != (pts.shape[1],):
        raise ValueError(f"reference point shape {r.shape} does not match m={pts.shape[1]}")
    return r


def _embed_3d(pts: np.ndarray, ref: np.ndarray):
    """Lift 2D instances to 3D (z=0 vs reference z=1) so one sweep serves both."""
    m = pts.shape[1]
    if m == 2:
        z = np.zeros(len(pts))
        return pts[:, 0].copy(), pts[:, 1].copy(), z, ref[0], ref[1], 1.0
    if m == 3:
        return (
            pts[:, 0].copy(),
            pts[:, 1].copy(),
            pts[:, 2].copy(),
            ref[0],
            ref[1],
            ref[2],
        )
    raise ValueError(f"hypervolume supports m=2 or m=3, got m={m}")


def hypervolume(points, ref) -> float:
    """Exact hypervolume dominated by `points` up to `ref` (minimization).

    Points at or beyond the reference contribute nothing. 2D uses a staircase
    sweep; 3D sweeps the third dimension while maintaining the 2D staircase.
    """
    pts = as_points(points)
    if len(pts) == 0:
        return 0.0
    r = _check_ref(pts, ref)
    xs, ys, zs, rx, ry, rz = _embed_3d(pts, r)
    return float(_kernels.hv3d(xs, ys, zs, rx, ry, rz))


def hv_contributions(points, ref) -> np.ndarray:
    """Exclusive hypervolume per point: hv(S) - hv(S \\ {p}), input order.

    Dominated points and duplicate vectors get 0.
    """
    pts = as_points(points)
    if len(pts) == 0:
        return np.empty(0)
    r = _check_ref(pts, ref)
    xs, ys, zs, rx, ry, rz = _embed_3d(pts, r)
    order = np.argsort(zs, kind="stable")
    out = _kernels.all_contribs_sorted(xs[order], ys[order], zs[order], rx, ry, rz)
    contrib = np.empty(len(pts))
    contrib[order] = out
    return contrib


def additive_epsilon(a, b) -> float:
    """Additive epsilon indicator eps(A, B): smallest shift of A that weakly
    dominates every point of B."""
    pa = as_points(a)
    pb = as_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("additive_epsilon needs non-empty sets")
    if pa.shape[1] != pb.shape[1]:
        raise ValueError("sets mix objective dimensions")
    # eps = max_b min_a max_i (a_i - b_i)
    diff = pa[:, None, :] - pb[None, :, :]
    return float(diff.max(axis=2).min(axis=0).max())


def ibea_fitness(points, kappa: float = 0.05) -> np.ndarray:
    """IBEA exponential fitness from pairwise additive-epsilon indicators.

    Objectives are rescaled to [0, 1] per component over the set; indicators
    are scaled by c = max |I| (c treated as 1 when all indicators are 0).
    Lower fitness = worse. F(x) = sum_{y != x} -exp(-I(y, x) / (kappa * c)).
    """
    pts = as_points(points)
    n = len(pts)
    if n == 0:
        return np.empty(0)
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span[span == 0.0] = 1.0
    z = (pts - lo) / span
    ind = (z[:, None, :] - z[None, :, :]).max(axis=2)  # ind[y, x] = I(y, x)
    c = float(np.abs(ind).max()) if n > 1 else 0.0
    if c == 0.0:
        c = 1.0
    return -(np.exp(-ind / (kappa * c)).sum(axis=0) - 1.0)


def igd(points, refset) -> float:
    """Inverted generational distance: mean over refset of nearest distance."""
    pts = as_points(points)
    refs = as_points(refset)
    if len(pts) == 0:
        raise ValueError("igd of an empty archive is undefined")
    if len(refs) == 0:
        raise ValueError("igd needs a non-empty reference set")
    if pts.shape[1] != refs.shape[1]:
        raise ValueError("archive and reference set mix objective dimensions")
    total = 0.0
    chunk = max(1, int(4e6) // max(1, len(pts)))
    for start in range(0, len(refs), chunk):
        block = refs[start : start + chunk]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        total += np.sqrt(d2.min(axis=1)).sum()
    return float(total / len(refs))


def _unit(w) -> np.ndarray:
    wv = np.asarray(w, dtype=float)
    norm = float(np.linalg.norm(wv))
    if norm == 0.0:
        raise ValueError("weight vector must be non-zero")
    return wv / norm


def pbi(z, w, ideal=None, theta: float = 5.0) -> float:
    """Penalty boundary intersection scalarization: d1 + theta * d2.

    d1 is the projection length onto the weight ray from the ideal point
    (clamped at 0), d2 the perpendicular residual.
    """
    zv = np.asarray(z, dtype=float)
    what = _unit(w)
    if ideal is None:
        g = zv.copy()
    else:
        g = zv - np.asarray(ideal, dtype=float)
    d1 = float(g @ what)
    if d1 < 0.0:
        d1 = 0.0
    d2 = float(np.linalg.norm(g - d1 * what))
    return d1 + theta * d2


def perpendicular_distance(z, w) -> float:
    """Distance from point z to the ray through weight vector w (origin-based)."""
    zv = np.asarray(z, dtype=float)
    what = _unit(w)
    t = float(zv @ what)
    return float(np.linalg.norm(zv - t * what))
