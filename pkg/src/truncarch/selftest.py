"""Embedded oracle suite: independent reference implementations and checks.

The oracles here deliberately take different algorithmic routes than the
library (inclusion-exclusion and Monte-Carlo instead of sweeps, exhaustive
enumeration instead of greedy loops, permutation counting instead of closed
forms) so that agreement is meaningful evidence of correctness.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np


# -- hypervolume oracles -------------------------------------------------------

def hv_inclusion_exclusion(points, ref) -> float:
    """Exact hypervolume by inclusion-exclusion over all point subsets."""
    pts = np.asarray(points, dtype=float)
    r = np.asarray(ref, dtype=float)
    n = len(pts)
    if n > 20:
        raise ValueError("inclusion-exclusion oracle is exponential; use <= 20 points")
    total = 0.0
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if (mask >> i) & 1]
        corner = pts[idx].max(axis=0)
        side = r - corner
        if (side > 0).all():
            vol = float(side.prod())
            total += vol if len(idx) % 2 == 1 else -vol
    return total


def hv_monte_carlo(points, ref, samples: int = 10**6, seed: int = 0):
    """Monte-Carlo hypervolume estimate; returns (estimate, standard error)."""
    pts = np.asarray(points, dtype=float)
    r = np.asarray(ref, dtype=float)
    live = pts[(pts < r).all(axis=1)]
    if len(live) == 0:
        return 0.0, 0.0
    lo = live.min(axis=0)
    box = float((r - lo).prod())
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    chunk = 200_000
    while done < samples:
        c = min(chunk, samples - done)
        u = lo + rng.random((c, len(r))) * (r - lo)
        covered = np.zeros(c, dtype=bool)
        for p in live:
            covered |= (u >= p).all(axis=1)
        hits += int(covered.sum())
        done += c
    frac = hits / samples
    est = box * frac
    se = box * math.sqrt(max(frac * (1.0 - frac), 1e-12) / samples)
    return est, se


# -- greedy / enumeration oracles ----------------------------------------------

def greedy_removal_oracle(points, ids, mu, ref) -> list[int]:
    """Reference greedy removal: repeatedly drop the min-contribution point
    (ties to lower id), contributions computed by inclusion-exclusion."""
    alive = list(range(len(points)))
    pts = np.asarray(points, dtype=float)
    while len(alive) > mu:
        full = hv_inclusion_exclusion(pts[alive], ref)
        best = None
        best_key = None
        for pos in alive:
            rest = [q for q in alive if q != pos]
            contrib = full - hv_inclusion_exclusion(pts[rest], ref)
            key = (contrib, ids[pos])
            if best is None or key < best_key:
                best, best_key = pos, key
        alive.remove(best)
    return alive


def greedy_inclusion_oracle(points, ids, mu, ref) -> list[int]:
    """Reference greedy inclusion: add the max-marginal-hypervolume candidate
    (ties to lower id) until mu are chosen."""
    pts = np.asarray(points, dtype=float)
    chosen: list[int] = []
    while len(chosen) < min(mu, len(pts)):
        cur = hv_inclusion_exclusion(pts[chosen], ref) if chosen else 0.0
        best = None
        best_key = None
        for pos in range(len(pts)):
            if pos in chosen:
                continue
            gain = hv_inclusion_exclusion(pts[chosen + [pos]], ref) - cur
            key = (-gain, ids[pos])
            if best is None or key < best_key:
                best, best_key = pos, key
        chosen.append(best)
    return chosen


def best_subset_hv(points, mu, ref) -> float:
    """Exhaustive optimum: max hypervolume over all subsets of size <= mu."""
    pts = np.asarray(points, dtype=float)
    best = 0.0
    for combo in itertools.combinations(range(len(pts)), min(mu, len(pts))):
        v = hv_inclusion_exclusion(pts[list(combo)], ref)
        if v > best:
            best = v
    return best


def _dyadic(rng, n, m, denom=8):
    """Random points on a k/denom grid in (0, 1): every coordinate, and every
    hypervolume term built from them against a dyadic reference, is exactly
    representable, so equal-contribution ties are well defined across
    implementations."""
    return rng.integers(1, denom, size=(n, m)) / denom


def run_selftest(perturb_hv: float = 0.0, reporter=None) -> list[tuple[str, bool, str]]:
    """Cross-check the library against every oracle in this module.

    Returns (name, passed, detail) per check; all-pass means the build's
    hypervolume, greedy selection, ranking statistics, and crowding agree
    with independent reference implementations. `perturb_hv` is a negative
    control: it scales the library's hypervolume values inside the
    comparisons, so any nonzero value beyond the Monte-Carlo noise floor
    must make the suite fail.
    """
    from .indicators import hypervolume
    from .policies import PolicyContext, PolicyId, crowding_distance, keep_positions
    from .stats import wilcoxon_rank_sum

    results: list[tuple[str, bool, str]] = []

    def check(name, passed, detail=""):
        results.append((name, bool(passed), detail))
        if reporter is not None:
            reporter(name, bool(passed), detail)

    # hypervolume vs Monte-Carlo, 50 random 2D/3D sets, 3 sigma
    rng = np.random.default_rng(2024)
    worst = 0.0
    bad = []
    for k in range(50):
        m = 2 + k % 2
        n = int(rng.integers(1, 21))
        pts = rng.random((n, m))
        ref = np.full(m, 1.1)
        exact = hypervolume(pts, ref) * (1.0 + perturb_hv)
        est, se = hv_monte_carlo(pts, ref, samples=10**6, seed=1000 + k)
        dev = abs(exact - est) / max(se, 1e-12)
        worst = max(worst, dev)
        if abs(exact - est) > 3.0 * se + 1e-9:
            bad.append(f"set {k}: exact {exact:.6g} vs mc {est:.6g} ({dev:.1f} sigma)")
    check("hypervolume vs monte-carlo (50 sets, 3 sigma)", not bad,
          bad[0] if bad else f"worst deviation {worst:.2f} sigma")

    # hypervolume vs inclusion-exclusion on dyadic grids (exact arithmetic)
    bad = []
    for k in range(60):
        m = 2 + k % 2
        n = int(rng.integers(1, 13))
        pts = _dyadic(rng, n, m)
        ref = np.full(m, 1.5)
        a = hypervolume(pts, ref) * (1.0 + perturb_hv)
        b = hv_inclusion_exclusion(pts, ref)
        if abs(a - b) > 1e-12:
            bad.append(f"set {k}: sweep {a!r} vs inclusion-exclusion {b!r}")
    check("hypervolume vs inclusion-exclusion (60 dyadic sets)", not bad,
          bad[0] if bad else "exact agreement")

    # greedy removal / inclusion vs oracles and enumerated optimum, 2D
    mism = []
    above = []
    cases = 0
    for n in range(3, 13):
        seeds = 1 if n >= 11 else 2
        for mu in range(1, min(6, n - 1) + 1):
            for s in range(seeds):
                sub = np.random.default_rng(10_000 + 97 * n + 13 * mu + s)
                pts = _dyadic(sub, n, 2)
                ids = np.arange(n)
                ref = np.full(2, 1.5)
                ctx = PolicyContext(hv_ref_point=ref)
                cases += 1

                kept, _ = keep_positions(PolicyId.SMS_REMOVAL, pts, ids, mu, ctx)
                want = greedy_removal_oracle(pts, ids, mu, ref)
                if sorted(kept.tolist()) != sorted(want):
                    mism.append(f"removal n={n} mu={mu} seed={s}")
                opt = best_subset_hv(pts, mu, ref)
                if hypervolume(pts[kept], ref) * (1.0 + perturb_hv) > opt + 1e-12:
                    above.append(f"removal n={n} mu={mu} seed={s} beats optimum")

                kept, _ = keep_positions(PolicyId.HV_INCLUSION, pts, ids, mu, ctx)
                want = greedy_inclusion_oracle(pts, ids, mu, ref)
                if kept.tolist() != want:
                    mism.append(f"inclusion n={n} mu={mu} seed={s}")
                if hypervolume(pts[kept], ref) * (1.0 + perturb_hv) > opt + 1e-12:
                    above.append(f"inclusion n={n} mu={mu} seed={s} beats optimum")
    check("greedy selection vs independent greedy oracle", not mism,
          mism[0] if mism else f"{cases} instances, exact match")
    check("greedy selection never beats enumerated optimum", not above,
          above[0] if above else f"{cases} instances within optimum")

    # rank-sum test vs exact permutation enumeration, all sizes <= 12
    bad = []
    pairs = 0
    for n1 in range(1, 12):
        for n2 in range(1, 13 - n1):
            for s in range(2):
                sub = np.random.default_rng(20_000 + 101 * n1 + 31 * n2 + s)
                x = (sub.integers(0, 5, n1) / 4).tolist()
                y = (sub.integers(0, 5, n2) / 4).tolist()
                pairs += 1
                a = wilcoxon_rank_sum(x, y)
                b = wilcoxon_enumeration_oracle(x, y)
                if abs(a - b) > 1e-12:
                    bad.append(f"n1={n1} n2={n2} seed={s}: {a} vs {b}")
    check("rank-sum test vs permutation enumeration", not bad,
          bad[0] if bad else f"{pairs} sample pairs, exact agreement")

    # crowding distance hand cases
    hand = [
        ([(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)], [np.inf, 2.0, np.inf]),
        ([(0.0, 1.0), (1.0, 0.0)], [np.inf, np.inf]),
        ([(0.0, 1.0), (0.4, 0.6), (0.45, 0.55), (0.5, 0.5), (1.0, 0.0)],
         [np.inf, 0.9, 0.2, 1.1, np.inf]),
        ([(0.0, 1.0), (0.1, 0.9), (0.48, 0.52), (0.5, 0.5), (1.0, 0.0)],
         [np.inf, 0.96, 0.8, 1.04, np.inf]),
    ]
    bad = []
    for pts, want in hand:
        got = crowding_distance(np.asarray(pts))
        if not np.allclose(got, want, rtol=0, atol=1e-12):
            bad.append(f"{pts} -> {got.tolist()} wanted {want}")
    check("crowding distance hand oracle", not bad,
          bad[0] if bad else f"{len(hand)} hand cases")

    return results


def wilcoxon_enumeration_oracle(x, y) -> float:
    """Exact two-sided rank-sum p-value by enumerating all group assignments."""
    pooled = list(x) + list(y)
    n1 = len(x)
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and pooled[order[j]] == pooled[order[i]]:
            j += 1
        mid = (i + j + 1) / 2.0  # average of 1-based ranks i+1..j
        for k in range(i, j):
            ranks[order[k]] = mid
        i = j
    w_obs = sum(ranks[:n1])
    le = 0
    ge = 0
    total = 0
    for combo in itertools.combinations(range(len(pooled)), n1):
        w = sum(ranks[i] for i in combo)
        if w <= w_obs + 1e-9:
            le += 1
        if w >= w_obs - 1e-9:
            ge += 1
        total += 1
    return min(1.0, 2.0 * min(le / total, ge / total))
