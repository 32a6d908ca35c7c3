"""Figure rendering for the reproduce path.

Each canned scenario gets one PNG next to its CSV output.  The CSVs remain
the primary artifact; these renders are a quick visual check, not a stable
interface.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metrics import max_pair_disagreement  # noqa: E402


def _scatter_3d(ax, opinions, color_coord, title):
    sc = ax.scatter(
        opinions[:, 0], opinions[:, 1], opinions[:, 2],
        c=opinions[:, color_coord], cmap="coolwarm", vmin=-1.0, vmax=1.0, s=8,
    )
    ax.set_title(title, fontsize=9)
    ax.set_xlim(-1, 1)
    ax.set_ylim(-1, 1)
    ax.set_zlim(-1, 1)
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_zticks([])
    return sc


def _render_snapshot_grid(trajectory, color_coords, path: Path) -> Path:
    snaps = trajectory.snapshots
    rows = len(color_coords)
    cols = len(snaps)
    fig = plt.figure(figsize=(2.2 * cols, 2.4 * rows))
    sc = None
    for r, cc in enumerate(color_coords):
        for k, (t, opinions) in enumerate(snaps):
            ax = fig.add_subplot(rows, cols, r * cols + k + 1, projection="3d")
            sc = _scatter_3d(ax, opinions, cc, f"t={t} (topic {cc + 1})")
    fig.colorbar(sc, ax=fig.axes, shrink=0.5, label="promoted-topic weight")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _render_curves(result, path: Path) -> Path:
    data = np.genfromtxt(result["curves"], delimiter=",", names=True)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(data["c"], data["c"], "k--", lw=0.8, label="initial correlation")
    ax1.plot(data["c"], data["c_two"], "r", label="after two-agent")
    ax1.plot(data["c"], data["c_one"], "b", label="after one-agent")
    ax1.plot(data["c"], data["polarization_cost"], "g", label="polarization cost")
    ax1.set_xlabel("initial correlation")
    ax1.legend(fontsize=7)
    ax2.plot(data["c"], data["two_agent_value"], "r", label="two-agent, both")
    ax2.plot(data["c"], data["one_agent_other_value"], "b", label="one-agent, other")
    ax2.axhline(1.0 / 3.0, ls="--", c="k", lw=0.8, label="one-agent, target (1/3)")
    ax2.set_xlabel("initial correlation")
    ax2.set_ylabel("new promoted-topic weight")
    ax2.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _render_pull(result, path: Path) -> Path:
    data = np.genfromtxt(result["curves"], delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.plot(data["alpha"], data["alpha_minus_pull"])
    ax.axvline(result["_critical_angle"], ls="--", c="k", lw=0.8)
    ax.set_xlabel("angle to intervention")
    ax.set_ylabel("per-step pull")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _render_disagreement(trajectory, path: Path) -> Path:
    ts = [t for t, _ in trajectory.snapshots]
    vals = [max(max_pair_disagreement(op), 1e-17) for _, op in trajectory.snapshots]
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.semilogy(ts, vals)
    ax.set_xlabel("t")
    ax.set_ylabel("max pairwise disagreement")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _render_duel(result, path: Path) -> Path:
    diag = result["_diagnostics"]
    t = np.arange(diag.w_norms.shape[0]) + 1
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.semilogy(t, np.maximum(diag.w_norms.max(axis=1), 1e-17), label="max out-of-plane norm")
    ax1.semilogy(t, np.maximum(diag.pair_disagreement, 1e-17), label="max disagreement")
    ax1.set_xlabel("t")
    ax1.legend(fontsize=7)
    both = (diag.regions == 1) | (diag.regions == 2)
    ax2.plot(t, both.sum(axis=1))
    ax2.set_xlabel("t")
    ax2.set_ylabel("agents inside absorbing cones")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render(figure_id: str, result: dict, out_dir) -> Path | None:
    out = Path(out_dir) / f"{figure_id}.png"
    if figure_id == "fig1":
        traj = result["_trajectory_obj"]
        return _render_snapshot_grid(traj, [3], out)
    if figure_id == "figB":
        traj = result["_trajectory_obj"]
        keep = [s for s in traj.snapshots if s[0] in (1, 5, 9, 13)]
        slim = type(traj)(
            snapshots=keep,
            applied_interventions=traj.applied_interventions[: keep[-1][0] - keep[0][0]],
            seed=traj.seed, eta=traj.eta, schedule=traj.schedule,
        )
        return _render_snapshot_grid(slim, [3, 4], out)
    if figure_id == "fig2-3":
        return _render_curves(result, out)
    if figure_id == "fig5":
        return _render_pull(result, out)
    if figure_id == "thm31-demo":
        return _render_disagreement(result["_trajectory_obj"], out)
    if figure_id == "duel-demo":
        return _render_duel(result, out)
    return None
