"""Rank-based comparison of result groups and compact letter displays."""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass

import numpy as np

EXACT_LIMIT = 12  # combined size up to which the permutation null is enumerated


@dataclass(frozen=True)
class SampleGroup:
    """One schedule's quality values across repeated runs."""

    label: str
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError(f"group {self.label!r} has no values")
        arr = np.asarray(self.values, dtype=float)
        if not np.isfinite(arr).all() or (arr < 0).any():
            raise ValueError(f"group {self.label!r} has non-finite or negative values")


@dataclass(frozen=True)
class GroupSummary:
    label: str
    mean: float
    std: float
    letters: str


def _midranks(vals):
    n = len(vals)
    order = sorted(range(n), key=lambda i: vals[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and vals[order[j + 1]] == vals[order[i]]:
            j += 1
        r = (i + j + 2) / 2.0  # average 1-based rank of the tied block
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


def wilcoxon_rank_sum(x, y) -> float:
    """Two-sided Wilcoxon rank-sum p-value with mid-rank tie handling.

    Small samples (combined size <= 12) get the exact permutation
    distribution of the rank sum; larger ones a normal approximation with
    tie-corrected variance and continuity correction. A degenerate null
    (zero variance, e.g. all values identical) yields p = 1.
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if not x or not y:
        raise ValueError("both samples must be non-empty")
    n1, n2 = len(x), len(y)
    total = n1 + n2
    ranks = _midranks(x + y)
    w = sum(ranks[:n1])

    if total <= EXACT_LIMIT:
        # midranks are half-integers, so the sums below compare exactly
        le = ge = count = 0
        for combo in itertools.combinations(range(total), n1):
            s = sum(ranks[i] for i in combo)
            count += 1
            if s <= w:
                le += 1
            if s >= w:
                ge += 1
        return min(1.0, 2.0 * min(le, ge) / count)

    mu = n1 * (total + 1) / 2.0
    tie_sum = 0.0
    for _, group in itertools.groupby(sorted(x + y)):
        t = len(list(group))
        tie_sum += t**3 - t
    var = n1 * n2 / 12.0 * ((total + 1) - tie_sum / (total * (total - 1)))
    if var <= 0:
        return 1.0
    d = abs(w - mu) - 0.5  # continuity correction toward the mean
    if d <= 0:
        return 1.0
    return min(1.0, math.erfc(d / math.sqrt(var) / math.sqrt(2.0)))


def compact_letters(labels, means, pairwise_p, alpha: float = 0.05) -> dict[str, str]:
    """Letter display: labels share a letter iff not significantly different.

    Insert-and-absorb: start from one group holding everything; each
    significant pair splits every column containing both; columns that
    become subsets of others are absorbed. Letters run a, b, c, ... in
    ascending-mean order (lower mean = better = earlier letter).
    """
    k = len(labels)
    if len(set(labels)) != k:
        raise ValueError("labels must be unique")
    means = [float(m) for m in means]
    p = np.asarray(pairwise_p, dtype=float)
    if p.shape != (k, k) or not np.array_equal(p, p.T):
        raise ValueError("pairwise_p must be a symmetric matrix over the labels")

    columns = [frozenset(range(k))]
    for a in range(k):
        for b in range(a + 1, k):
            if p[a, b] < alpha:
                new_cols = []
                for col in columns:
                    if a in col and b in col:
                        new_cols.append(col - {a})
                        new_cols.append(col - {b})
                    else:
                        new_cols.append(col)
                uniq = set(new_cols)
                columns = [c for c in uniq if not any(c < d for d in uniq)]

    rank = {i: r for r, i in enumerate(sorted(range(k), key=lambda i: (means[i], labels[i])))}
    columns.sort(key=lambda col: sorted(rank[i] for i in col))
    if len(columns) > len(string.ascii_lowercase):
        raise ValueError("more letter groups than letters")
    out = {lab: "" for lab in labels}
    for letter, col in zip(string.ascii_lowercase, columns):
        for i in col:
            out[labels[i]] += letter
    return out


def summarize(groups, alpha: float = 0.05) -> list[GroupSummary]:
    """Mean, sample std (n-1 divisor, exact 0 for identical values), and
    significance letters for each group, tested pairwise against the rest."""
    if len(groups) < 2:
        raise ValueError("need at least two groups to compare")
    labels = [g.label for g in groups]
    means = [float(np.mean(g.values)) for g in groups]
    stds = [
        0.0 if len(set(g.values)) == 1 else float(np.std(g.values, ddof=1))
        for g in groups
    ]
    k = len(groups)
    p = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            p[i, j] = p[j, i] = wilcoxon_rank_sum(groups[i].values, groups[j].values)
    letters = compact_letters(labels, means, p, alpha)
    return [
        GroupSummary(label=lab, mean=m, std=s, letters=letters[lab])
        for lab, m, s in zip(labels, means, stds)
    ]


def fmt_mean(v: float) -> str:
    """4 significant digits, scientific: 3.718e-02."""
    return f"{v:.3e}"


def fmt_std(v: float) -> str:
    """2 significant digits, scientific: 0.0e+00."""
    return f"{v:.1e}"
