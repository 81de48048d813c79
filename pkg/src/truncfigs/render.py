"""Reading plot-data CSVs and rendering them as 3D scatter panels."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from mpl_toolkits.mplot3d.art3d import Poly3DCollection

FRONT_SUM = {"simplex": 1.0, "inverted": 2.0}
SCHEDULES = ("immediate", "batch", "unbounded")

# one fixed viewing angle and size for every panel, so figures compare
_ELEV, _AZIM = 30, 45
_PANEL_INCHES = 4.6


@dataclass(frozen=True)
class PlotData:
    igd: float
    vertices: np.ndarray  # (3, 3) front corner points
    points: np.ndarray  # (n, 3) archive objective vectors


@dataclass(frozen=True)
class PanelSpec:
    plot_data_path: Path
    front_kind: str
    title: str
    out_path: Path


def igd_label(igd: float) -> str:
    """Annotation text, 4 significant digits (IGD=0.2229 style)."""
    return f"IGD={igd:.4g}"


def read_plot_data(path, front_kind: str) -> PlotData:
    """Parse and validate one plot-data CSV.

    Every plotted coordinate row must lie on the named front's plane
    (checked before any rendering happens); an empty point set is refused.
    """
    path = Path(path)
    if front_kind not in FRONT_SUM:
        raise ValueError(f"unknown front kind {front_kind!r}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["kind", "f1", "f2", "f3"]:
        raise ValueError(f"{path}: not a plot-data file")
    igd = None
    vertices = []
    points = []
    for row in rows[1:]:
        if row[0] == "igd":
            igd = float(row[1])
        elif row[0] == "vertex":
            vertices.append([float(v) for v in row[1:]])
        elif row[0] == "point":
            points.append([float(v) for v in row[1:]])
        else:
            raise ValueError(f"{path}: unknown row kind {row[0]!r}")
    if igd is None:
        raise ValueError(f"{path}: missing igd row")
    if len(vertices) != 3:
        raise ValueError(f"{path}: expected 3 front vertices, got {len(vertices)}")
    if not points:
        raise ValueError(f"{path}: no archive points, refusing to render")
    vertices = np.asarray(vertices)
    points = np.asarray(points)
    target = FRONT_SUM[front_kind]
    for name, arr in (("vertex", vertices), ("point", points)):
        off = np.abs(arr.sum(axis=1) - target)
        if off.max() > 1e-9:
            i = int(off.argmax())
            raise ValueError(
                f"{path}: {name} {arr[i].tolist()} is off the {front_kind} "
                f"plane (sum deviates by {off.max():.2e})"
            )
    return PlotData(igd=igd, vertices=vertices, points=points)


def _draw(ax, data: PlotData, title: str):
    tri = Poly3DCollection([data.vertices], alpha=0.15, facecolor="tab:gray",
                           edgecolor="black", linewidths=0.8)
    ax.add_collection3d(tri)
    ax.scatter(data.points[:, 0], data.points[:, 1], data.points[:, 2],
               s=12, c="tab:blue", depthshade=True)
    ax.set_xlabel("f1")
    ax.set_ylabel("f2")
    ax.set_zlabel("f3")
    hi = float(max(data.vertices.max(), data.points.max()))
    ax.set_xlim(0, hi)
    ax.set_ylim(0, hi)
    ax.set_zlim(0, hi)
    ax.view_init(elev=_ELEV, azim=_AZIM)
    ax.set_title(title)


def render_panel(spec: PanelSpec) -> Path:
    """Render one plot-data file to one image."""
    data = read_plot_data(spec.plot_data_path, spec.front_kind)
    fig = plt.figure(figsize=(_PANEL_INCHES, _PANEL_INCHES))
    ax = fig.add_subplot(111, projection="3d")
    _draw(ax, data, f"{spec.title} ({igd_label(data.igd)})")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return Path(spec.out_path)


def _discover(plot_dir: Path):
    """(front, policy) pairs having plot-data files, from the file names."""
    pairs = {}
    for path in sorted(plot_dir.glob("*.csv")):
        parts = path.stem.split("_")
        if len(parts) < 3 or parts[0] not in FRONT_SUM or parts[-1] not in SCHEDULES:
            continue
        front, policy, schedule = parts[0], "_".join(parts[1:-1]), parts[-1]
        pairs.setdefault((front, policy), set()).add(schedule)
    return pairs


def render_grid(results_dir, out_dir) -> list[Path]:
    """One 1x3 composite (immediate | batch | unbounded) per (policy, front).

    Requires a complete plotdata directory: any (policy, front) pair missing
    a schedule file aborts with every missing cell named.
    """
    results_dir = Path(results_dir)
    out_dir = Path(out_dir)
    plot_dir = results_dir / "plotdata"
    if not plot_dir.is_dir():
        raise FileNotFoundError(f"{plot_dir}: no plotdata directory")
    pairs = _discover(plot_dir)
    if not pairs:
        raise ValueError(f"{plot_dir}: no plot-data files found")
    missing = [
        f"{front}_{policy}_{schedule}.csv"
        for (front, policy), have in sorted(pairs.items())
        for schedule in SCHEDULES
        if schedule not in have
    ]
    if missing:
        raise ValueError("incomplete plotdata, missing: " + ", ".join(missing))

    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for front, policy in sorted(pairs):
        fig = plt.figure(figsize=(3 * _PANEL_INCHES, _PANEL_INCHES + 0.5))
        for i, schedule in enumerate(SCHEDULES):
            data = read_plot_data(plot_dir / f"{front}_{policy}_{schedule}.csv", front)
            ax = fig.add_subplot(1, 3, i + 1, projection="3d")
            _draw(ax, data, f"{schedule} ({igd_label(data.igd)})")
        fig.suptitle(f"{policy} on the {front} sequence")
        fig.tight_layout()
        target = out_dir / f"{policy}_{front}.png"
        fig.savefig(target, dpi=110)
        plt.close(fig)
        written.append(target)
    return written
