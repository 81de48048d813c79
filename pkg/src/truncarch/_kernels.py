"""Compiled inner loops: dominance scans, exact hypervolume, greedy selection.

Everything here works on plain float64/int64 arrays. 2D problems are embedded
into 3D by the callers (z=0 against a z-reference of 1), so the sweep kernels
only ever see three dimensions.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MASK63 = (1 << 63) - 1


@njit(cache=True)
def nondominated_mask(pts):
    n, m = pts.shape
    keep = np.ones(n, np.bool_)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            le = True
            lt = False
            for k in range(m):
                a = pts[j, k]
                b = pts[i, k]
                if a > b:
                    le = False
                    break
                elif a < b:
                    lt = True
            if le and lt:
                keep[i] = False
                break
    return keep


@njit(cache=True)
def dominance_depth(pts):
    """Dominance depth per point: 0 for the non-dominated layer, then peeled."""
    n, m = pts.shape
    depth = np.full(n, -1, np.int64)
    assigned = 0
    rank = 0
    while assigned < n:
        for i in range(n):
            if depth[i] != -1:
                continue
            dominated = False
            for j in range(n):
                if j == i or depth[j] >= 0:
                    continue
                le = True
                lt = False
                for k in range(m):
                    a = pts[j, k]
                    b = pts[i, k]
                    if a > b:
                        le = False
                        break
                    elif a < b:
                        lt = True
                if le and lt:
                    dominated = True
                    break
            if not dominated:
                depth[i] = -2  # joins the current rank after the pass
        for i in range(n):
            if depth[i] == -2:
                depth[i] = rank
                assigned += 1
        rank += 1
    return depth


@njit(cache=True)
def _stair_add(sx, sy, cnt, u, v, rx, ry):
    """Insert corner (u, v) into the staircase of boxes [(u,v), (rx,ry)].

    sx/sy hold `cnt` corners sorted by x ascending, y strictly descending.
    Returns (newly covered area, new cnt). Caller guarantees u < rx, v < ry.
    """
    lo = 0
    hi = cnt
    while lo < hi:
        mid = (lo + hi) >> 1
        if sx[mid] < u:
            lo = mid + 1
        else:
            hi = mid
    pos = lo
    if pos > 0 and sy[pos - 1] <= v:
        return 0.0, cnt
    if pos < cnt and sx[pos] == u and sy[pos] <= v:
        return 0.0, cnt
    top = ry if pos == 0 else sy[pos - 1]
    add = 0.0
    last_x = u
    end = pos
    while end < cnt and sy[end] >= v:
        add += (sx[end] - last_x) * (top - v)
        last_x = sx[end]
        top = sy[end]
        end += 1
    right = rx if end == cnt else sx[end]
    add += (right - last_x) * (top - v)
    removed = end - pos
    if removed == 0:
        for k in range(cnt, pos, -1):
            sx[k] = sx[k - 1]
            sy[k] = sy[k - 1]
        cnt += 1
    elif removed > 1:
        shift = removed - 1
        for k in range(end, cnt):
            sx[k - shift] = sx[k]
            sy[k - shift] = sy[k]
        cnt -= shift
    sx[pos] = u
    sy[pos] = v
    return add, cnt


@njit(cache=True)
def hv3d(xs, ys, zs, rx, ry, rz):
    """Exact hypervolume of the union of boxes [p, ref], dimension sweep in z."""
    n = xs.size
    if n == 0:
        return 0.0
    order = np.argsort(zs, kind="mergesort")
    sx = np.empty(n + 1)
    sy = np.empty(n + 1)
    cnt = 0
    area = 0.0
    vol = 0.0
    zprev = 0.0
    started = False
    for t in range(n):
        i = order[t]
        x = xs[i]
        y = ys[i]
        z = zs[i]
        if x >= rx or y >= ry or z >= rz:
            continue
        if started:
            vol += area * (z - zprev)
        zprev = z
        started = True
        add, cnt = _stair_add(sx, sy, cnt, x, y, rx, ry)
        area += add
    if started:
        vol += area * (rz - zprev)
    return vol


@njit(cache=True)
def _point_contrib(p0, xs, ys, zs, n, rx, ry, rz, sx, sy):
    """Exclusive hypervolume of point p0; arrays z-sorted, first n entries live.

    Integrates the exclusive cross-section area upward from z0. Points at or
    below z0 seed the intruder staircase; later points shrink the area until a
    point weakly better in both x and y closes the region.
    """
    x0 = xs[p0]
    y0 = ys[p0]
    z0 = zs[p0]
    if x0 >= rx or y0 >= ry or z0 >= rz:
        return 0.0
    cnt = 0
    covered = 0.0
    for j in range(p0):
        u = xs[j] if xs[j] > x0 else x0
        v = ys[j] if ys[j] > y0 else y0
        if u >= rx or v >= ry:
            continue
        if u <= x0 and v <= y0:
            return 0.0
        add, cnt = _stair_add(sx, sy, cnt, u, v, rx, ry)
        covered += add
    j = p0 + 1
    while j < n and zs[j] <= z0:  # z ties act like past intruders
        u = xs[j] if xs[j] > x0 else x0
        v = ys[j] if ys[j] > y0 else y0
        if u < rx and v < ry:
            if u <= x0 and v <= y0:
                return 0.0
            add, cnt = _stair_add(sx, sy, cnt, u, v, rx, ry)
            covered += add
        j += 1
    area = (rx - x0) * (ry - y0) - covered
    contrib = 0.0
    zcur = z0
    while j < n:
        zj = zs[j]
        if zj >= rz:
            break
        if area <= 0.0:
            area = 0.0
            break
        contrib += area * (zj - zcur)
        zcur = zj
        u = xs[j] if xs[j] > x0 else x0
        v = ys[j] if ys[j] > y0 else y0
        if u < rx and v < ry:
            if u <= x0 and v <= y0:
                area = 0.0
                break
            add, cnt = _stair_add(sx, sy, cnt, u, v, rx, ry)
            area -= add
        j += 1
    if area > 0.0:
        contrib += area * (rz - zcur)
    return contrib


@njit(cache=True)
def all_contribs_sorted(xs, ys, zs, rx, ry, rz):
    n = xs.size
    out = np.empty(n)
    sx = np.empty(n + 1)
    sy = np.empty(n + 1)
    for p in range(n):
        out[p] = _point_contrib(p, xs, ys, zs, n, rx, ry, rz, sx, sy)
    return out


@njit(cache=True)
def sms_reduce_sorted(xs, ys, zs, ids, orig, mu, rx, ry, rz):
    """Drop the minimum-contribution point (ties: lower id) until mu remain.

    Arrays must be sorted by (z, id) ascending and are compacted in place.
    Removing a point can only grow the others' exclusive regions, so cached
    contributions stay valid lower bounds; the argmin is re-verified by exact
    recomputation until it is fresh for the current round. Returns the kept
    entries' original positions.
    """
    n = xs.size
    cnt = n
    sx = np.empty(n + 1)
    sy = np.empty(n + 1)
    contrib = np.empty(n)
    fresh = np.zeros(n, np.int64)
    for p in range(n):
        contrib[p] = _point_contrib(p, xs, ys, zs, cnt, rx, ry, rz, sx, sy)
    for rnd in range(n - mu):
        while True:
            best = 0
            for p in range(1, cnt):
                if contrib[p] < contrib[best] or (
                    contrib[p] == contrib[best] and ids[p] < ids[best]
                ):
                    best = p
            if fresh[best] == rnd:
                break
            contrib[best] = _point_contrib(best, xs, ys, zs, cnt, rx, ry, rz, sx, sy)
            fresh[best] = rnd
        for k in range(best + 1, cnt):
            xs[k - 1] = xs[k]
            ys[k - 1] = ys[k]
            zs[k - 1] = zs[k]
            ids[k - 1] = ids[k]
            orig[k - 1] = orig[k]
            contrib[k - 1] = contrib[k]
            fresh[k - 1] = fresh[k]
        cnt -= 1
    return orig[:cnt].copy()


@njit(cache=True)
def _marginal(x, y, z, ax, ay, az, na, rx, ry, rz, sx, sy):
    """Hypervolume gained by adding (x,y,z) to the z-sorted selection a*."""
    gx = rx - x
    gy = ry - y
    gz = rz - z
    if gx <= 0.0 or gy <= 0.0 or gz <= 0.0:
        return 0.0
    box = gx * gy * gz
    cnt = 0
    area = 0.0
    cov = 0.0
    zcur = z
    for t in range(na):
        w = az[t] if az[t] > z else z
        if w >= rz:
            break
        u = ax[t] if ax[t] > x else x
        v = ay[t] if ay[t] > y else y
        if u >= rx or v >= ry:
            continue
        cov += area * (w - zcur)
        zcur = w
        add, cnt = _stair_add(sx, sy, cnt, u, v, rx, ry)
        area += add
    cov += area * (rz - zcur)
    return box - cov


@njit(cache=True)
def greedy_include(pxs, pys, pzs, ids, mu, rx, ry, rz):
    """Greedily pick up to mu points maximizing marginal hypervolume.

    Ties go to the lower id. Gains only shrink as the selection grows
    (submodularity), so cached gains are upper bounds verified lazily at the
    argmax. Returns chosen positions in selection order.
    """
    n = pxs.size
    take = mu if mu < n else n
    ax = np.empty(take)
    ay = np.empty(take)
    az = np.empty(take)
    na = 0
    sx = np.empty(take + 1)
    sy = np.empty(take + 1)
    gain = np.empty(n)
    fresh = np.zeros(n, np.int64)
    used = np.zeros(n, np.bool_)
    chosen = np.empty(take, np.int64)
    for p in range(n):
        gx = rx - pxs[p]
        gy = ry - pys[p]
        gz = rz - pzs[p]
        gain[p] = gx * gy * gz if (gx > 0.0 and gy > 0.0 and gz > 0.0) else 0.0
    for rnd in range(take):
        while True:
            best = -1
            for p in range(n):
                if used[p]:
                    continue
                if best < 0 or gain[p] > gain[best] or (
                    gain[p] == gain[best] and ids[p] < ids[best]
                ):
                    best = p
            if fresh[best] == rnd:
                break
            gain[best] = _marginal(
                pxs[best], pys[best], pzs[best], ax, ay, az, na, rx, ry, rz, sx, sy
            )
            fresh[best] = rnd
        chosen[rnd] = best
        used[best] = True
        ins = na
        while ins > 0 and az[ins - 1] > pzs[best]:
            ax[ins] = ax[ins - 1]
            ay[ins] = ay[ins - 1]
            az[ins] = az[ins - 1]
            ins -= 1
        ax[ins] = pxs[best]
        ay[ins] = pys[best]
        az[ins] = pzs[best]
        na += 1
    return chosen


@njit(cache=True)
def _next_u64(state):
    """splitmix64 step: returns (new state, output)."""
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def niching_select(assign, dist, ids, selectable, rho, want, seed):
    """NSGA-III niche-filling loop over the splitting front.

    assign[i] is the reference index candidate i associates to, dist[i] its
    perpendicular distance, selectable[i] marks splitting-front membership.
    rho carries niche counts from members already accepted via whole fronts.
    Draws (reference among minimum-count ties, member of a non-empty niche)
    come from a splitmix64 stream seeded/continued from `seed`; returns the
    picked mask plus the advanced stream state so a caller can thread the
    stream through successive truncation events. The state crosses the
    boundary as int64 (bit pattern of the internal uint64) to keep one
    dispatch signature.
    """
    n = assign.size
    nref = rho.size
    excluded = np.zeros(nref, np.bool_)
    picked = np.zeros(n, np.bool_)
    remaining = np.zeros(nref, np.int64)
    for i in range(n):
        if selectable[i]:
            remaining[assign[i]] += 1
    state = np.uint64(np.int64(seed))
    got = 0
    while got < want:
        mn = -1
        for r in range(nref):
            if not excluded[r] and (mn < 0 or rho[r] < rho[mn]):
                mn = r
        if mn < 0:
            break
        ties = 0
        for r in range(nref):
            if not excluded[r] and rho[r] == rho[mn]:
                ties += 1
        state, rv = _next_u64(state)
        k = rv % np.uint64(ties)
        ref = -1
        c = np.uint64(0)
        for r in range(nref):
            if not excluded[r] and rho[r] == rho[mn]:
                if c == k:
                    ref = r
                    break
                c += np.uint64(1)
        if remaining[ref] == 0:
            excluded[ref] = True
            continue
        pick = -1
        if rho[ref] == 0:
            for i in range(n):
                if selectable[i] and not picked[i] and assign[i] == ref:
                    if pick < 0 or dist[i] < dist[pick] or (
                        dist[i] == dist[pick] and ids[i] < ids[pick]
                    ):
                        pick = i
        else:
            state, rv = _next_u64(state)
            k2 = rv % np.uint64(remaining[ref])
            c2 = np.uint64(0)
            for i in range(n):
                if selectable[i] and not picked[i] and assign[i] == ref:
                    if c2 == k2:
                        pick = i
                        break
                    c2 += np.uint64(1)
        picked[pick] = True
        remaining[ref] -= 1
        rho[ref] += 1
        got += 1
    return picked, np.int64(state)


def warmup():
    """Trigger JIT compilation (or cache load) of every kernel on tiny inputs."""
    pts = np.array([[0.0, 1.0, 0.5], [1.0, 0.0, 0.5], [0.5, 0.5, 0.5]])
    nondominated_mask(pts)
    dominance_depth(pts)
    xs, ys, zs = pts[:, 0].copy(), pts[:, 1].copy(), pts[:, 2].copy()
    hv3d(xs, ys, zs, 2.0, 2.0, 2.0)
    order = np.argsort(zs, kind="mergesort")
    sx, sy, sz = xs[order].copy(), ys[order].copy(), zs[order].copy()
    all_contribs_sorted(sx, sy, sz, 2.0, 2.0, 2.0)
    ids = np.arange(3, dtype=np.int64)
    sms_reduce_sorted(sx.copy(), sy.copy(), sz.copy(), ids.copy(), ids.copy(), 2, 2.0, 2.0, 2.0)
    greedy_include(xs, ys, zs, ids, 2, 2.0, 2.0, 2.0)
    niching_select(
        np.zeros(3, np.int64),
        np.array([0.1, 0.2, 0.3]),
        ids,
        np.ones(3, np.bool_),
        np.zeros(1, np.int64),
        2,
        7,
    )
