"""Flat-file export: deterministic CSV/JSON writers and the points-CSV reader.

Floats are written with Python's shortest round-trip repr, so identical data
produces identical bytes on every platform and every value survives a
parse-format cycle exactly.  All writes go through a temp file in the target
directory followed by an atomic rename.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .errors import ConfigError
from .metrics import polarization_report


def format_float(x) -> str:
    return repr(float(x))


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp defaults to 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else format_float(cell) for cell in row
        ))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def trajectory_header(d: int) -> list[str]:
    return ["t", "agent_id"] + [f"coord_{j}" for j in range(1, d + 1)]


def metrics_header(d: int) -> list[str]:
    return (
        ["t", "rho_total"]
        + [f"rho_{j}" for j in range(1, d + 1)]
        + ["max_pair_disagreement", "cluster_size_a", "cluster_size_b", "exact_flag"]
    )


def write_trajectory_csv(path, trajectory: Trajectory) -> None:
    """One row per (snapshot time, agent); agent ids are 1-based."""
    d = trajectory.initial_opinions.shape[1]

    def rows():
        for t, opinions in trajectory.snapshots:
            for i, u in enumerate(opinions, start=1):
                yield [str(t), str(i)] + [format_float(x) for x in u]

    write_csv(path, trajectory_header(d), rows())


def metrics_row(t: int, opinions, *, restarts: int = 32, seed=0) -> list[str]:
    report = polarization_report(opinions, restarts=restarts, seed=seed)
    return (
        [str(t), format_float(report.rho_total)]
        + [format_float(x) for x in report.rho_per_topic]
        + [
            format_float(report.max_pair_disagreement),
            str(report.cluster_sizes[0]),
            str(report.cluster_sizes[1]),
            "1" if report.exact else "0",
        ]
    )


def write_metrics_csv(path, trajectory: Trajectory, *, restarts: int = 32,
                      seed=0) -> None:
    """One metrics row per snapshot time."""
    d = trajectory.initial_opinions.shape[1]
    rows = [
        metrics_row(t, opinions, restarts=restarts, seed=seed)
        for t, opinions in trajectory.snapshots
    ]
    write_csv(path, metrics_header(d), rows)


def write_points_csv(path, points) -> None:
    pts = np.asarray(points, dtype=np.float64)
    header = [f"coord_{j}" for j in range(1, pts.shape[1] + 1)]
    write_csv(path, header, ([format_float(x) for x in row] for row in pts))


def read_points_csv(path) -> np.ndarray:
    """Read a points CSV with header coord_1..coord_d."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty points file") from None
        expected = [f"coord_{j}" for j in range(1, len(header) + 1)]
        if header != expected:
            raise ConfigError(
                f"{path}: header must be {expected[:3]}..., got {header}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ConfigError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)
