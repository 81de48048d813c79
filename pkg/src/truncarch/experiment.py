"""Benchmark grid orchestration.

Runs every (front, policy, schedule, shuffle) cell of the configured grid,
scores each final archive by IGD against a dense lattice reference set, and
persists raw records, a letter-annotated summary table, and the median run
of each cell for plotting.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .core import Solution
from .indicators import igd
from .policies import PolicyContext, PolicyId
from .refsets import (
    FRONT_KINDS,
    InputSequence,
    build_sequence,
    das_dennis,
    divisions_for,
    igd_reference_set,
    read_sequence,
    write_sequence,
)
from .scheduler import Schedule, batch_size_for, run_archiving
from .stats import SampleGroup, fmt_mean, fmt_std, summarize

_ALL_POLICIES = tuple(p.value for p in PolicyId)
_ALL_SCHEDULES = tuple(s.value for s in Schedule)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one grid run, all seeds explicit."""

    fronts: tuple[str, ...] = FRONT_KINDS
    n_solutions: int = 5000
    mu: int = 105
    n_shuffles: int = 31
    policies: tuple[str, ...] = _ALL_POLICIES
    schedules: tuple[str, ...] = _ALL_SCHEDULES
    seed: int = 10
    theta: float = 5.0
    kappa: float = 0.05
    hv_ref_scale: float = 1.1
    ideal_mode: str = "fixed"
    alpha: float = 0.05
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.n_shuffles < 1:
            raise ValueError(f"n_shuffles must be >= 1, got {self.n_shuffles}")
        if not 1 <= self.mu < self.n_solutions:
            raise ValueError(
                f"need 1 <= mu < n_solutions, got mu={self.mu}, n={self.n_solutions}"
            )
        if not self.fronts:
            raise ValueError("fronts must not be empty")
        for f in self.fronts:
            if f not in FRONT_KINDS:
                raise ValueError(f"unknown front kind {f!r} (choose from {FRONT_KINDS})")
        if not self.policies:
            raise ValueError("policies must not be empty")
        for p in self.policies:
            PolicyId(p)  # raises naming the offending value
        if not self.schedules:
            raise ValueError("schedules must not be empty")
        for s in self.schedules:
            Schedule(s)
        if self.ideal_mode not in ("fixed", "running"):
            raise ValueError(f"ideal_mode must be 'fixed' or 'running', got {self.ideal_mode!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.theta < 0 or self.kappa <= 0 or self.hv_ref_scale <= 0:
            raise ValueError("theta must be >= 0; kappa and hv_ref_scale must be > 0")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")
        for key in ("fronts", "policies", "schedules"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


@dataclass(frozen=True)
class ResultRecord:
    """One completed run; archive members are kept in arrival order."""

    front: str
    policy: str
    schedule: str
    shuffle: int
    igd: float
    duration_ms: float
    archive: tuple[Solution, ...] = ()


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[ResultRecord]
    failures: list[tuple[str, str, str, int, str]]
    out_dir: Path

    def cell(self, front: str, policy: str, schedule: str) -> list[ResultRecord]:
        return [
            r
            for r in self.records
            if r.front == front and r.policy == policy and r.schedule == schedule
        ]


def _niche_seed(seed: int, front: str, policy: str, schedule: str, shuffle: int) -> int:
    """Stable per-run stream seed so reruns and worker counts cannot shift it."""
    text = f"{seed}|{front}|{policy}|{schedule}|{shuffle}"
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << 63) - 1)


def _context_for(cfg: ExperimentConfig, front: str, policy: str, schedule: str,
                 shuffle: int, m: int = 3) -> PolicyContext:
    weights = None
    if policy in (PolicyId.MOEAD_PBI.value, PolicyId.NSGA3.value):
        weights = das_dennis(m, divisions_for(m, cfg.mu))
    running = cfg.ideal_mode == "running"
    return PolicyContext(
        weights=weights,
        theta=cfg.theta,
        kappa=cfg.kappa,
        hv_ref_scale=cfg.hv_ref_scale,
        ideal_point=None if running else np.zeros(m),
        running_ideal=running,
        niche_seed=_niche_seed(cfg.seed, front, policy, schedule, shuffle),
    )


_REFSET_CACHE: dict[str, np.ndarray] = {}


def _refset(front: str) -> np.ndarray:
    if front not in _REFSET_CACHE:
        _REFSET_CACHE[front] = igd_reference_set(front)
    return _REFSET_CACHE[front]


def run_single(cfg: ExperimentConfig, front: str, policy: str, schedule: str,
               shuffle: int) -> ResultRecord:
    """Build the sequence for one grid cell + shuffle, run it, score it."""
    sched = Schedule(schedule)
    seq = build_sequence(
        front,
        cfg.n_solutions,
        cfg.seed,
        cfg.seed + shuffle,
        batch_size_for(sched, cfg.mu, cfg.n_solutions),
    )
    ctx = _context_for(cfg, front, policy, schedule, shuffle)
    t0 = time.perf_counter()
    trace = run_archiving(seq, PolicyId(policy), sched, cfg.mu, ctx)
    dur = (time.perf_counter() - t0) * 1e3
    members = trace.final_archive.members
    value = igd([s.objectives for s in members], _refset(front))
    return ResultRecord(front, policy, schedule, shuffle, value, dur, members)


def _run_task(args):
    cfg, front, policy, schedule, shuffle = args
    try:
        return run_single(cfg, front, policy, schedule, shuffle), None
    except Exception as exc:  # a failing run aborts only its own cell
        return None, (front, policy, schedule, shuffle, f"{type(exc).__name__}: {exc}")


def run_experiment(cfg: ExperimentConfig, progress=None) -> ExperimentResult:
    """Run the whole grid and write raw, summary, archive, and plot files.

    Deterministic given the config seeds, regardless of worker count: the
    canonical record order is (front, policy, schedule, shuffle) in config
    order, imposed after all runs complete.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [
        (cfg, front, policy, schedule, shuffle)
        for front in cfg.fronts
        for policy in cfg.policies
        for schedule in cfg.schedules
        for shuffle in range(cfg.n_shuffles)
    ]
    outcomes = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for i, outcome in enumerate(pool.map(_run_task, tasks, chunksize=1)):
                outcomes.append(outcome)
                if progress is not None:
                    progress(i + 1, len(tasks), outcome)
    else:
        for i, task in enumerate(tasks):
            outcome = _run_task(task)
            outcomes.append(outcome)
            if progress is not None:
                progress(i + 1, len(tasks), outcome)

    key = {
        (f, p, s): (i, j, k)
        for i, f in enumerate(cfg.fronts)
        for j, p in enumerate(cfg.policies)
        for k, s in enumerate(cfg.schedules)
    }
    records = sorted(
        (rec for rec, _ in outcomes if rec is not None),
        key=lambda r: (*key[r.front, r.policy, r.schedule], r.shuffle),
    )
    failures = sorted(
        (fail for _, fail in outcomes if fail is not None),
        key=lambda f: (*key[f[0], f[1], f[2]], f[3]),
    )

    result = ExperimentResult(cfg, records, failures, out)
    write_raw_results(result, out / "raw_results.csv")
    write_summary(result, out / "summary.csv", out / "summary.txt")
    write_median_runs(result)
    if failures:
        with (out / "failures.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["front", "policy", "schedule", "shuffle", "error"])
            w.writerows(failures)
    return result


# -- persistence -----------------------------------------------------------

def write_raw_results(result: ExperimentResult, path):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["front", "policy", "schedule", "shuffle", "igd", "duration_ms"])
        for r in result.records:
            w.writerow(
                [r.front, r.policy, r.schedule, r.shuffle,
                 format(r.igd, ".17g"), format(r.duration_ms, ".3f")]
            )


def read_raw_results(path) -> list[ResultRecord]:
    """Records without archives; enough to recompute every summary figure."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header = ["front", "policy", "schedule", "shuffle", "igd", "duration_ms"]
    if not rows or rows[0] != header:
        raise ValueError(f"{path}: not a raw results file")
    return [
        ResultRecord(f, p, s, int(k), float(v), float(d))
        for f, p, s, k, v, d in rows[1:]
    ]


def summary_rows(result: ExperimentResult):
    """(front, policy, schedule, mean, std, letters, n) per grid cell.

    Letters compare the schedules of one (front, policy) column against each
    other; a cell missing all its runs is skipped.
    """
    cfg = result.config
    rows = []
    for front in cfg.fronts:
        for policy in cfg.policies:
            groups = []
            for schedule in cfg.schedules:
                vals = tuple(r.igd for r in result.cell(front, policy, schedule))
                if vals:
                    groups.append(SampleGroup(schedule, vals))
            if not groups:
                continue
            if len(groups) == 1:
                g = groups[0]
                mean = float(np.mean(g.values))
                std = 0.0 if len(set(g.values)) == 1 else float(np.std(g.values, ddof=1))
                rows.append((front, policy, g.label, mean, std, "a", len(g.values)))
                continue
            for g, s in zip(groups, summarize(groups, cfg.alpha)):
                rows.append((front, policy, g.label, s.mean, s.std, s.letters, len(g.values)))
    return rows


def write_summary(result: ExperimentResult, csv_path, txt_path):
    rows = summary_rows(result)
    with Path(csv_path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["front", "policy", "schedule", "mean", "std", "letters", "n"])
        for front, policy, schedule, mean, std, letters, n in rows:
            w.writerow([front, policy, schedule,
                        format(mean, ".17g"), format(std, ".17g"), letters, n])

    cfg = result.config
    cells = {(f, p, s): (m, sd, le) for f, p, s, m, sd, le, _ in rows}
    lines = []
    for front in cfg.fronts:
        lines.append(f"{front} sequence")
        widths = {}
        table = []
        for schedule in cfg.schedules:
            row = [schedule]
            for policy in cfg.policies:
                got = cells.get((front, policy, schedule))
                row.append(
                    "-" if got is None
                    else f"{fmt_mean(got[0])} ± {fmt_std(got[1])} ({got[2]})"
                )
            table.append(row)
        header = ["schedule"] + list(cfg.policies)
        for row in [header] + table:
            for i, cell in enumerate(row):
                widths[i] = max(widths.get(i, 0), len(cell))
        for row in [header] + table:
            lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
        lines.append("")
    text = "\n".join(lines)
    Path(txt_path).write_text(text)
    return text


def select_median_run(records) -> int:
    """Shuffle index of the median-IGD record in one cell.

    Even counts take the lower of the two middle values; records tied at the
    median value resolve to the lowest shuffle index.
    """
    records = list(records)
    if not records:
        raise ValueError("cannot pick a median run from an empty cell")
    ordered = sorted(r.igd for r in records)
    median = ordered[(len(ordered) - 1) // 2]
    return min(r.shuffle for r in records if r.igd == median)


_FRONT_VERTICES = {
    "simplex": np.eye(3),
    "inverted": 1.0 - np.eye(3),
}


def export_plot_data(front: str, igd_value: float, members, path):
    """One scatter file per figure panel: IGD line, front vertices, points."""
    members = list(members)
    if not members:
        raise ValueError("refusing to write plot data for an empty archive")
    if front not in _FRONT_VERTICES:
        raise ValueError(f"unknown front kind {front!r}")
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "f1", "f2", "f3"])
        w.writerow(["igd", format(float(igd_value), ".17g"), "", ""])
        for v in _FRONT_VERTICES[front]:
            w.writerow(["vertex"] + [format(x, ".17g") for x in v])
        for s in members:
            w.writerow(["point"] + [format(x, ".17g") for x in s.objectives])


def write_median_runs(result: ExperimentResult):
    """archives/ and plotdata/ files for the median-IGD run of every cell."""
    cfg = result.config
    arch_dir = result.out_dir / "archives"
    plot_dir = result.out_dir / "plotdata"
    arch_dir.mkdir(exist_ok=True)
    plot_dir.mkdir(exist_ok=True)
    for front in cfg.fronts:
        for policy in cfg.policies:
            for schedule in cfg.schedules:
                cell = result.cell(front, policy, schedule)
                if not cell:
                    continue
                pick = select_median_run(cell)
                rec = next(r for r in cell if r.shuffle == pick)
                name = f"{front}_{policy}_{schedule}.csv"
                seq = InputSequence(
                    front_kind=front,
                    base_seed=cfg.seed,
                    shuffle_seed=cfg.seed + pick,
                    batches=(tuple(rec.archive),),
                )
                write_sequence(seq, arch_dir / name)
                export_plot_data(front, rec.igd, rec.archive, plot_dir / name)


def result_from_raw(results_dir, alpha: float = 0.05) -> ExperimentResult:
    """Rebuild an in-memory result view from raw_results.csv alone.

    Archives are not reloaded; grid orderings are taken from first
    appearance in the file. Enough to regenerate summary tables.
    """
    results_dir = Path(results_dir)
    records = read_raw_results(results_dir / "raw_results.csv")
    if not records:
        raise ValueError(f"{results_dir}: raw results file has no records")

    def first_seen(values):
        return tuple(dict.fromkeys(values))

    cfg = ExperimentConfig(
        fronts=first_seen(r.front for r in records),
        policies=first_seen(r.policy for r in records),
        schedules=first_seen(r.schedule for r in records),
        n_shuffles=max(r.shuffle for r in records) + 1,
        alpha=alpha,
        output_dir=str(results_dir),
    )
    return ExperimentResult(cfg, records, [], results_dir)


def rederive_plot_data(results_dir, alpha: float = 0.05) -> list[str]:
    """Rebuild plotdata/ from raw_results.csv + archives/, without re-running."""
    result = result_from_raw(results_dir, alpha)
    cfg = result.config
    arch_dir = result.out_dir / "archives"
    plot_dir = result.out_dir / "plotdata"
    plot_dir.mkdir(exist_ok=True)
    written = []
    for front in cfg.fronts:
        for policy in cfg.policies:
            for schedule in cfg.schedules:
                cell = result.cell(front, policy, schedule)
                if not cell:
                    continue
                pick = select_median_run(cell)
                rec = next(r for r in cell if r.shuffle == pick)
                name = f"{front}_{policy}_{schedule}.csv"
                arch_path = arch_dir / name
                if not arch_path.exists():
                    raise FileNotFoundError(f"missing median archive {arch_path}")
                members = read_sequence(arch_path).all_solutions()
                export_plot_data(front, rec.igd, members, plot_dir / name)
                written.append(name)
    return written
