"""Archiving runs: feed an input sequence through a truncation policy.

The schedule fixes how many arrivals accumulate before a truncation check:
every single arrival (the archive grows to mu+1, then shrinks), every mu
arrivals (2mu down to mu), or never until the whole sequence has arrived
(one truncation of everything). Discarded solutions never come back.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Archive, stack
from .policies import MoeadState, PolicyContext, PolicyId, keep_positions
from .refsets import InputSequence

_MASK63 = (1 << 63) - 1


class Schedule(str, Enum):
    IMMEDIATE = "immediate"
    BATCH = "batch"
    UNBOUNDED = "unbounded"


def batch_size_for(schedule, mu: int, n: int) -> int:
    """Arrivals per truncation check under a schedule."""
    s = Schedule(schedule)
    if s is Schedule.IMMEDIATE:
        return 1
    if s is Schedule.BATCH:
        return mu
    return max(n, 1)


@dataclass(frozen=True)
class EventDiagnostics:
    """One truncation event: sizes plus candidate-set corner snapshots."""

    batch_index: int
    size_before: int
    size_after: int
    ideal: tuple[float, ...]
    nadir: tuple[float, ...]


@dataclass(frozen=True)
class RunTrace:
    final_archive: Archive
    truncation_event_count: int
    events: tuple[EventDiagnostics, ...] = ()


def _check_batching(seq: InputSequence, schedule: Schedule, mu: int):
    sizes = [len(b) for b in seq.batches]
    if schedule is Schedule.IMMEDIATE:
        ok = all(s == 1 for s in sizes)
    elif schedule is Schedule.BATCH:
        ok = bool(sizes) and all(s == mu for s in sizes[:-1]) and 0 < sizes[-1] <= mu
    else:
        ok = len(sizes) == 1
    if not ok:
        raise ValueError(
            f"sequence batch sizes {sizes[:4]}{'...' if len(sizes) > 4 else ''} "
            f"do not match schedule {schedule.value!r} with mu={mu}"
        )


def run_archiving(
    seq: InputSequence,
    policy,
    schedule,
    mu: int,
    ctx: PolicyContext | None = None,
    diagnostics: bool = False,
) -> RunTrace:
    """Drive one archiving run and return the final archive with a trace.

    Each batch joins the current archive to form the candidate set; when that
    set exceeds mu the policy truncates it back to mu. MOEAD_PBI instead
    refreshes its per-weight incumbents on every arrival, overflow or not.
    """
    policy = PolicyId(policy)
    schedule = Schedule(schedule)
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    ctx = ctx if ctx is not None else PolicyContext()
    if policy in (PolicyId.MOEAD_PBI, PolicyId.NSGA3):
        if ctx.weights is None or len(ctx.weights) != mu:
            raise ValueError(f"{policy.value} needs exactly mu={mu} weight vectors")
    _check_batching(seq, schedule, mu)

    solutions = seq.all_solutions()
    pts_all, ids_all = stack(solutions)
    moead = MoeadState(ctx, pts_all.shape[1]) if policy is PolicyId.MOEAD_PBI else None
    rng_state = ctx.niche_seed & _MASK63  # niching stream, threaded across events

    arch = np.empty(0, dtype=np.int64)  # positions into the sequence, ascending
    n_events = 0
    diags: list[EventDiagnostics] = []
    offset = 0
    for bi, batch in enumerate(seq.batches):
        batch_pos = np.arange(offset, offset + len(batch), dtype=np.int64)
        offset += len(batch)
        cand = np.concatenate([arch, batch_pos])
        overflow = len(cand) > mu
        if moead is not None:
            moead.update(pts_all[batch_pos], batch_pos)
            arch_new = np.sort(moead.incumbent_positions())
        elif overflow:
            kept, rng_state = keep_positions(
                policy, pts_all[cand], ids_all[cand], mu, ctx, rng_state
            )
            arch_new = np.sort(cand[kept])
        else:
            arch_new = cand
        if overflow:
            n_events += 1
            if diagnostics:
                cpts = pts_all[cand]
                diags.append(
                    EventDiagnostics(
                        batch_index=bi,
                        size_before=len(cand),
                        size_after=len(arch_new),
                        ideal=tuple(cpts.min(axis=0)),
                        nadir=tuple(cpts.max(axis=0)),
                    )
                )
        arch = arch_new

    members = tuple(solutions[int(p)] for p in arch)  # arrival order
    return RunTrace(
        final_archive=Archive(capacity=mu, members=members),
        truncation_event_count=n_events,
        events=tuple(diags),
    )
