"""Archive truncation policies.

Every policy answers the same question: given more candidates than capacity,
which mu survive? All are deterministic given (candidate order, context); the
NSGA-III niching draws come from a PRNG seeded via the context. Ties break to
the lower solution id throughout (kept for selections, removed for removals).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernels
from .core import Solution, stack
from .indicators import as_points

_MASK63 = (1 << 63) - 1


class PolicyId(str, Enum):
    NSGA2_ONEOFF = "nsga2_oneoff"
    NSGA2_ITERATIVE = "nsga2_iterative"
    SMS_REMOVAL = "sms_removal"
    HV_INCLUSION = "hv_inclusion"
    IBEA = "ibea"
    MOEAD_PBI = "moead_pbi"
    NSGA3 = "nsga3"


@dataclass(frozen=True, eq=False)
class PolicyContext:
    """Shared knobs for truncation policies.

    weights: decomposition directions for MOEAD_PBI / NSGA3 (one per slot).
    hv_ref_point: fixed hypervolume reference; when None the reference is
    hv_ref_scale times the componentwise maximum of the candidate set,
    resolved per truncation event.
    ideal_point: PBI ideal; None means the origin. running_ideal switches
    MOEAD_PBI to a componentwise running minimum over seen candidates.
    """

    weights: np.ndarray | None = None
    theta: float = 5.0
    kappa: float = 0.05
    hv_ref_point: tuple[float, ...] | None = None
    hv_ref_scale: float = 1.1
    ideal_point: tuple[float, ...] | None = None
    running_ideal: bool = False
    niche_seed: int = 0
    prefilter: bool = False

    def resolve_hv_ref(self, pts: np.ndarray) -> np.ndarray:
        if self.hv_ref_point is not None:
            ref = np.asarray(self.hv_ref_point, dtype=float)
            if ref.shape != (pts.shape[1],):
                raise ValueError("hv_ref_point dimension mismatch")
            return ref
        return pts.max(axis=0) * self.hv_ref_scale

    def resolve_ideal(self, m: int) -> np.ndarray:
        if self.ideal_point is None:
            return np.zeros(m)
        ideal = np.asarray(self.ideal_point, dtype=float)
        if ideal.shape != (m,):
            raise ValueError("ideal_point dimension mismatch")
        return ideal

    def unit_weights(self, m: int) -> np.ndarray:
        if self.weights is None:
            raise ValueError("this policy needs ctx.weights")
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[1] != m:
            raise ValueError(f"weights shape {w.shape} does not match m={m}")
        norms = np.linalg.norm(w, axis=1)
        if (norms == 0).any():
            raise ValueError("weights contain a zero vector")
        return w / norms[:, None]


# -- crowding distance -----------------------------------------------------------

def crowding_distance(points, ids=None) -> np.ndarray:
    """NSGA-II crowding distance within one front.

    Per objective the extremes get infinity and interior points accumulate the
    normalized gap between their neighbours. Sort ties resolve by id so the
    result is independent of input order.
    """
    pts = as_points(points)
    n = len(pts)
    if ids is None:
        if isinstance(points, (list, tuple)) and n and isinstance(points[0], Solution):
            ids = np.array([s.id for s in points], dtype=np.int64)
        else:
            ids = np.arange(n, dtype=np.int64)
    if n <= 2:
        return np.full(n, np.inf)
    d = np.zeros(n)
    for j in range(pts.shape[1]):
        vals = pts[:, j]
        order = np.lexsort((ids, vals))
        d[order[0]] = np.inf
        d[order[-1]] = np.inf
        span = vals[order[-1]] - vals[order[0]]
        if span > 0:
            d[order[1:-1]] += (vals[order[2:]] - vals[order[:-2]]) / span
    return d


# -- array-level policy cores ------------------------------------------------------
# Each takes (pts, ids, mu, ctx) and returns kept positions into the input.

def _split_fronts(pts, mu):
    """Accept whole dominance layers; return (accepted positions, splitting front)."""
    depth = _kernels.dominance_depth(pts)
    accepted: list[int] = []
    for rank in range(int(depth.max()) + 1):
        members = np.flatnonzero(depth == rank)
        if len(accepted) + len(members) <= mu:
            accepted.extend(members.tolist())
        else:
            return np.array(accepted, dtype=np.int64), members
    return np.array(accepted, dtype=np.int64), np.empty(0, dtype=np.int64)


def _nsga2_oneoff_keep(pts, ids, mu, ctx):
    accepted, split = _split_fronts(pts, mu)
    k = mu - len(accepted)
    if k > 0 and len(split):
        d = crowding_distance(pts[split], ids=ids[split])
        # drop the worst (len - k) at once; ties follow the removal rule
        order = np.lexsort((ids[split], d))
        accepted = np.concatenate([accepted, split[order[len(split) - k :]]])
    return np.sort(accepted)


def _nsga2_iterative_keep(pts, ids, mu, ctx):
    accepted, split = _split_fronts(pts, mu)
    k = mu - len(accepted)
    if k > 0 and len(split):
        alive = split.copy()
        while len(alive) > k:
            d = crowding_distance(pts[alive], ids=ids[alive])
            worst = np.lexsort((ids[alive], d))[0]
            alive = np.delete(alive, worst)
        accepted = np.concatenate([accepted, alive])
    return np.sort(accepted)


def _hv_arrays(pts, ids, ctx):
    """Resolve the reference and embed 2D into 3D for the sweep kernels."""
    m = pts.shape[1]
    if m not in (2, 3):
        raise ValueError(f"hypervolume-based policies support m=2 or 3, got m={m}")
    ref = ctx.resolve_hv_ref(pts)
    if m == 2:
        xs, ys = pts[:, 0].copy(), pts[:, 1].copy()
        zs = np.zeros(len(pts))
        return xs, ys, zs, float(ref[0]), float(ref[1]), 1.0
    return (
        pts[:, 0].copy(),
        pts[:, 1].copy(),
        pts[:, 2].copy(),
        float(ref[0]),
        float(ref[1]),
        float(ref[2]),
    )


def _sms_keep(pts, ids, mu, ctx):
    xs, ys, zs, rx, ry, rz = _hv_arrays(pts, ids, ctx)
    order = np.lexsort((ids, zs))
    kept = _kernels.sms_reduce_sorted(
        xs[order],
        ys[order],
        zs[order],
        ids[order].astype(np.int64),
        order.astype(np.int64),
        mu,
        rx,
        ry,
        rz,
    )
    return np.sort(kept)


def _inclusion_keep(pts, ids, mu, ctx):
    xs, ys, zs, rx, ry, rz = _hv_arrays(pts, ids, ctx)
    return _kernels.greedy_include(
        xs, ys, zs, ids.astype(np.int64), mu, rx, ry, rz
    )  # selection order


def _ibea_scaled_fitness(pts, kappa):
    """Rescaled coordinates, indicator scale c, and initial fitness (chunked)."""
    n = len(pts)
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    z = (pts - lo) / span
    chunk = max(1, int(2e6) // max(1, n))
    c = 0.0
    for s in range(0, n, chunk):
        block = z[s : s + chunk]
        ind = (block[:, None, :] - z[None, :, :]).max(axis=2)
        c = max(c, float(np.abs(ind).max()))
    if c == 0.0:
        c = 1.0
    fit = np.zeros(n)
    for s in range(0, n, chunk):
        block = z[s : s + chunk]
        ind = (block[:, None, :] - z[None, :, :]).max(axis=2)
        fit -= np.exp(-ind / (kappa * c)).sum(axis=0)
    fit += 1.0  # remove each point's own diagonal term exp(0)
    return z, c, fit


def _ibea_keep(pts, ids, mu, ctx):
    if ctx.kappa <= 0:
        raise ValueError(f"kappa must be positive, got {ctx.kappa}")
    z, c, fit = _ibea_scaled_fitness(pts, ctx.kappa)
    denom = ctx.kappa * c
    alive = np.arange(len(pts))
    fit = fit.copy()
    while len(alive) > mu:
        f = fit[alive]
        worst = int(np.argmin(f))
        tied = np.flatnonzero(f == f[worst])
        if len(tied) > 1:
            worst = tied[np.argmin(ids[alive][tied])]
        gone = alive[worst]
        alive = np.delete(alive, worst)
        # removing y hands its -exp(-I(y, x)) term back to every survivor
        ind = (z[gone][None, :] - z[alive]).max(axis=1)
        fit[alive] += np.exp(-ind / denom)
    return alive  # already ascending = input order


class MoeadState:
    """Per-weight PBI incumbents updated as candidates arrive."""

    def __init__(self, ctx: PolicyContext, m: int):
        if ctx.weights is None:
            raise ValueError("MOEAD_PBI needs ctx.weights")
        self.what = ctx.unit_weights(m)
        self.theta = ctx.theta
        self.running = ctx.running_ideal
        if ctx.running_ideal and ctx.ideal_point is None:
            # running mode: the ideal is the componentwise min over seen candidates
            self.ideal = np.full(m, np.inf)
        else:
            self.ideal = ctx.resolve_ideal(m)
        nw = len(self.what)
        self.inc_val = np.full(nw, np.inf)
        self.inc_pos = np.full(nw, -1, dtype=np.int64)
        self.inc_vec = np.zeros((nw, m))

    def _pbi(self, vals: np.ndarray) -> np.ndarray:
        g = vals - self.ideal
        d1 = g @ self.what.T
        np.maximum(d1, 0.0, out=d1)
        resid = g[:, None, :] - d1[:, :, None] * self.what[None, :, :]
        d2 = np.linalg.norm(resid, axis=2)
        return d1 + self.theta * d2

    def update(self, vals: np.ndarray, positions: np.ndarray):
        """Process a batch in arrival order (strict-less replacement)."""
        if self.running:
            # the ideal can move between arrivals, so take them one at a time
            for i in range(len(vals)):
                self._update_block(vals[i : i + 1], positions[i : i + 1])
        else:
            self._update_block(vals, positions)

    def _update_block(self, vals: np.ndarray, positions: np.ndarray):
        if self.running:
            new_ideal = np.minimum(self.ideal, vals.min(axis=0))
            if not np.array_equal(new_ideal, self.ideal):
                self.ideal = new_ideal
                held = self.inc_pos >= 0
                if held.any():
                    pb = self._pbi(self.inc_vec[held])
                    self.inc_val[held] = pb[np.arange(pb.shape[0]), np.flatnonzero(held)]
        pb = self._pbi(vals)  # (batch, nw)
        first_min = pb.argmin(axis=0)
        cols = np.arange(pb.shape[1])
        best = pb[first_min, cols]
        better = best < self.inc_val
        self.inc_val[better] = best[better]
        self.inc_pos[better] = positions[first_min[better]]
        self.inc_vec[better] = vals[first_min[better]]

    def incumbent_positions(self) -> np.ndarray:
        """De-duplicated incumbent positions, in weight order."""
        out: list[int] = []
        seen: set[int] = set()
        for p in self.inc_pos:
            p = int(p)
            if p >= 0 and p not in seen:
                seen.add(p)
                out.append(p)
        return np.array(out, dtype=np.int64)


def _moead_keep(pts, ids, mu, ctx):
    if ctx.weights is None or len(ctx.weights) != mu:
        raise ValueError("MOEAD_PBI needs exactly mu weight vectors")
    state = MoeadState(ctx, pts.shape[1])
    state.update(pts, np.arange(len(pts), dtype=np.int64))
    return state.incumbent_positions()


def _nsga3_keep_state(pts, ids, mu, ctx, rng_state):
    """NSGA3 truncation threading the niching PRNG state across calls."""
    if ctx.weights is None or len(ctx.weights) != mu:
        raise ValueError("NSGA3 needs exactly mu weight vectors")
    accepted, split = _split_fronts(pts, mu)
    k = mu - len(accepted)
    if k == 0 or len(split) == 0:
        return np.sort(accepted), rng_state
    what = ctx.unit_weights(pts.shape[1])
    norm = _nsga3_normalize(pts)
    t = norm @ what.T
    resid = norm[:, None, :] - t[:, :, None] * what[None, :, :]
    dist = np.linalg.norm(resid, axis=2)
    assign = dist.argmin(axis=1).astype(np.int64)
    mindist = dist[np.arange(len(pts)), assign]
    rho = np.bincount(assign[accepted], minlength=len(what)).astype(np.int64)
    selectable = np.zeros(len(pts), dtype=bool)
    selectable[split] = True
    picked, rng_state = _kernels.niching_select(
        assign,
        mindist,
        ids.astype(np.int64),
        selectable,
        rho,
        k,
        rng_state,
    )
    return np.sort(np.concatenate([accepted, np.flatnonzero(picked)])), rng_state


def _nsga3_normalize(pts: np.ndarray) -> np.ndarray:
    """Translate by the ideal point and scale by hyperplane intercepts.

    Extreme points minimize the achievement scalarizing function along each
    axis (off-axis weight 1e-6). A singular system or non-positive intercepts
    fall back to the componentwise maximum.
    """
    m = pts.shape[1]
    ideal = pts.min(axis=0)
    shifted = pts - ideal
    asf_w = np.full((m, m), 1e-6)
    np.fill_diagonal(asf_w, 1.0)
    asf = (shifted[None, :, :] / asf_w[:, None, :]).max(axis=2)  # (m, n)
    extremes = shifted[asf.argmin(axis=1)]
    intercepts = None
    try:
        coef = np.linalg.solve(extremes, np.ones(m))
        with np.errstate(divide="ignore"):
            cand = 1.0 / coef
        if np.isfinite(cand).all() and (cand > 0).all():
            intercepts = cand
    except np.linalg.LinAlgError:
        pass
    if intercepts is None:
        intercepts = shifted.max(axis=0)
    denom = np.where(intercepts > 1e-12, intercepts, 1.0)
    return shifted / denom


_ARRAY_FNS = {
    PolicyId.NSGA2_ONEOFF: _nsga2_oneoff_keep,
    PolicyId.NSGA2_ITERATIVE: _nsga2_iterative_keep,
    PolicyId.SMS_REMOVAL: _sms_keep,
    PolicyId.HV_INCLUSION: _inclusion_keep,
    PolicyId.IBEA: _ibea_keep,
    PolicyId.MOEAD_PBI: _moead_keep,
}


def keep_positions(policy: PolicyId, pts, ids, mu, ctx, rng_state=None):
    """Array-level truncation: survivor positions in the candidate arrays,
    plus the advanced NSGA3 niching stream state (other policies return it
    untouched). Pass the previous event's state to keep one stream per run;
    None seeds a fresh stream from ctx.niche_seed.

    MOEAD_PBI has no capacity shortcut: incumbents are recomputed even when
    the candidates already fit, so the archive is always the incumbent union.
    """
    if rng_state is None:
        rng_state = ctx.niche_seed & _MASK63
    shortcut = policy is not PolicyId.MOEAD_PBI
    if shortcut and len(pts) <= mu:
        return np.arange(len(pts), dtype=np.int64), rng_state
    live = None
    if ctx.prefilter:
        live = np.flatnonzero(_kernels.nondominated_mask(pts))
        if shortcut and len(live) <= mu:
            return live.astype(np.int64), rng_state
        pts, ids = pts[live], ids[live]
    if policy is PolicyId.NSGA3:
        kept, rng_state = _nsga3_keep_state(pts, ids, mu, ctx, rng_state)
    else:
        kept = _ARRAY_FNS[policy](pts, ids, mu, ctx)
    kept = kept.astype(np.int64)
    if live is not None:
        kept = live[kept]
    return kept, rng_state


def _truncate(policy: PolicyId, cands: Sequence[Solution], mu: int, ctx) -> list[Solution]:
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    if policy is not PolicyId.MOEAD_PBI and len(cands) <= mu:
        return list(cands)
    if not len(cands):
        return []
    ctx = ctx if ctx is not None else PolicyContext()
    pts, ids = stack(cands)
    if len(set(ids.tolist())) != len(ids):
        raise ValueError("candidate ids must be unique")
    kept, _ = keep_positions(policy, pts, ids, mu, ctx)
    return [cands[int(i)] for i in kept]


def truncate(policy: PolicyId, cands, mu: int, ctx: PolicyContext | None = None):
    """Run one truncation policy over a candidate list."""
    return _truncate(PolicyId(policy), cands, mu, ctx)


def truncate_nsga2_oneoff(cands, mu, ctx=None):
    """One-shot crowding-distance truncation on the splitting front."""
    return _truncate(PolicyId.NSGA2_ONEOFF, cands, mu, ctx)


def truncate_nsga2_iterative(cands, mu, ctx=None):
    """Remove the worst-crowding member one at a time, recomputing distances."""
    return _truncate(PolicyId.NSGA2_ITERATIVE, cands, mu, ctx)


def truncate_sms_removal(cands, mu, ctx=None):
    """Iteratively drop the least hypervolume contributor."""
    return _truncate(PolicyId.SMS_REMOVAL, cands, mu, ctx)


def truncate_hv_inclusion(cands, mu, ctx=None):
    """Greedily rebuild the archive by maximal marginal hypervolume.

    Returns survivors in selection order.
    """
    return _truncate(PolicyId.HV_INCLUSION, cands, mu, ctx)


def truncate_ibea(cands, mu, ctx=None):
    """Iteratively remove the minimum IBEA fitness member, updating fitness."""
    return _truncate(PolicyId.IBEA, cands, mu, ctx)


def truncate_moead(cands, mu, ctx=None):
    """Per-weight PBI incumbents; returns their de-duplicated union."""
    return _truncate(PolicyId.MOEAD_PBI, cands, mu, ctx)


def truncate_nsga3(cands, mu, ctx=None):
    """Reference-direction niching truncation (normalized, seeded tie-breaks)."""
    return _truncate(PolicyId.NSGA3, cands, mu, ctx)
