"""End-to-end tests of the command-line interface (subprocess level)."""

import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from polarize.export import read_points_csv, write_points_csv


def polarize(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    env.pop("POLARIZE_SEED", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "polarize", *map(str, args)],
        capture_output=True, text=True, env=env, cwd=cwd,
    )


def base_config(**overrides):
    cfg = {
        "version": 1,
        "dimension": 3,
        "eta": 1.0,
        "seed": 11,
        "steps": 15,
        "agents": {"count": 6, "init": "uniform-sphere"},
        "schedule": {"variant": "iid-uniform"},
        "outputs": {"trajectory": "trajectory.csv", "metrics": "metrics.csv"},
    }
    cfg.update(overrides)
    return cfg


def write_config(path, cfg):
    path.write_text(json.dumps(cfg))
    return path


class TestSimulate:
    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path / "s.json", base_config())
        for sub in ("a", "b"):
            res = polarize("simulate", cfg, "--out-dir", tmp_path / sub, "--quiet")
            assert res.returncode == 0, res.stderr
        for name in ("trajectory.csv", "metrics.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_zero_steps_row_count(self, tmp_path):
        cfg = write_config(tmp_path / "s.json", base_config(steps=0))
        res = polarize("simulate", cfg, "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "trajectory.csv")))
        assert len(rows) == 6
        assert all(r["t"] == "1" for r in rows)

    def test_antipodal_agents_stay_antipodal(self, tmp_path):
        u = [0.6, 0.0, 0.8]
        cfg = base_config(
            agents={"init": "explicit", "opinions": [u, [-0.6, 0.0, -0.8]]},
            steps=50,
        )
        path = write_config(tmp_path / "s.json", cfg)
        res = polarize("simulate", path, "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "trajectory.csv")))
        tmax = max(int(r["t"]) for r in rows)
        final = {
            r["agent_id"]: np.array(
                [float(r["coord_1"]), float(r["coord_2"]), float(r["coord_3"])]
            )
            for r in rows
            if int(r["t"]) == tmax
        }
        assert np.linalg.norm(final["1"] + final["2"]) < 1e-9

    def test_seed_priority_flag_beats_config(self, tmp_path):
        cfg = write_config(tmp_path / "s.json", base_config())
        polarize("simulate", cfg, "--out-dir", tmp_path / "cfgseed", "--quiet")
        polarize("simulate", cfg, "--out-dir", tmp_path / "flagseed", "--quiet",
                 "--seed", "999")
        a = (tmp_path / "cfgseed" / "trajectory.csv").read_bytes()
        b = (tmp_path / "flagseed" / "trajectory.csv").read_bytes()
        assert a != b

    def test_env_seed_lowest_priority(self, tmp_path):
        cfg = base_config()
        del cfg["seed"]
        path = write_config(tmp_path / "s.json", cfg)
        # no seed anywhere -> config error
        res = polarize("simulate", path, "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 2
        # env seed fills the gap
        res = polarize("simulate", path, "--out-dir", tmp_path / "env", "--quiet",
                       env_extra={"POLARIZE_SEED": "11"})
        assert res.returncode == 0, res.stderr
        # and matches the config-seed run byte for byte
        cfg2 = write_config(tmp_path / "s2.json", base_config())
        polarize("simulate", cfg2, "--out-dir", tmp_path / "cfg", "--quiet")
        assert (tmp_path / "env" / "trajectory.csv").read_bytes() == (
            tmp_path / "cfg" / "trajectory.csv"
        ).read_bytes()

    def test_metrics_schema(self, tmp_path):
        cfg = write_config(tmp_path / "s.json", base_config(steps=3))
        polarize("simulate", cfg, "--out-dir", tmp_path, "--quiet")
        with open(tmp_path / "metrics.csv") as fh:
            header = fh.readline().strip().split(",")
        assert header == [
            "t", "rho_total", "rho_1", "rho_2", "rho_3",
            "max_pair_disagreement", "cluster_size_a", "cluster_size_b",
            "exact_flag",
        ]

    def test_parse_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        res = polarize("simulate", bad, "--out-dir", tmp_path)
        assert res.returncode == 2
        assert "line" in res.stderr

    def test_missing_field_exit_2(self, tmp_path):
        cfg = base_config()
        del cfg["dimension"]
        path = write_config(tmp_path / "s.json", cfg)
        res = polarize("simulate", path, "--out-dir", tmp_path)
        assert res.returncode == 2
        assert "dimension" in res.stderr

    def test_dimension_mismatch_exit_2(self, tmp_path):
        cfg = base_config(schedule={"variant": "fixed", "vector": [1.0, 0.0]})
        path = write_config(tmp_path / "s.json", cfg)
        res = polarize("simulate", path, "--out-dir", tmp_path)
        assert res.returncode == 2

    def test_io_error_exit_4(self, tmp_path):
        blocker = tmp_path / "blocked"
        blocker.write_text("a file, not a directory")
        cfg = write_config(tmp_path / "s.json", base_config())
        res = polarize("simulate", cfg, "--out-dir", blocker / "sub")
        assert res.returncode == 4


class TestReproduce:
    def test_fig5_peak_at_critical_angle(self, tmp_path):
        res = polarize("reproduce", "fig5", "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        data = np.genfromtxt(tmp_path / "fig5_curve.csv", delimiter=",", names=True)
        peak = data["alpha"][np.argmax(data["alpha_minus_pull"])]
        assert abs(peak - 0.9553166181245093) < 2e-3
        assert (tmp_path / "fig5.png").exists()

    def test_no_render_skips_png(self, tmp_path):
        res = polarize("reproduce", "fig5", "--out-dir", tmp_path, "--quiet",
                       "--no-render")
        assert res.returncode == 0, res.stderr
        assert not (tmp_path / "fig5.png").exists()

    def test_one_shot_curves_at_zero(self, tmp_path):
        res = polarize("reproduce", "fig2-3", "--out-dir", tmp_path, "--quiet",
                       "--no-render")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "fig2-3_curves.csv")))
        assert len(rows) == 199
        at_zero = next(r for r in rows if abs(float(r["c"])) < 1e-12)
        assert float(at_zero["c_one"]) == 0.0
        assert abs(float(at_zero["c_two"]) - 0.3675444679663241) < 1e-12

    def test_single_influencer_sign_coupling(self, tmp_path):
        res = polarize("reproduce", "fig1", "--out-dir", tmp_path, "--quiet",
                       "--no-render")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "fig1_trajectory.csv")))
        first = {r["agent_id"]: float(r["coord_1"]) for r in rows if r["t"] == "1"}
        after = {r["agent_id"]: float(r["coord_4"]) for r in rows if r["t"] == "2"}
        assert len(first) == 500
        assert all(np.sign(after[a]) == np.sign(first[a]) for a in first)

    def test_unknown_figure_exit_2(self, tmp_path):
        res = polarize("reproduce", "fig9", "--out-dir", tmp_path)
        assert res.returncode == 2

    def test_two_influencer_example_runs(self, tmp_path):
        res = polarize("reproduce", "figB", "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "figB_trajectory.csv")))
        assert max(int(r["t"]) for r in rows) == 13
        assert (tmp_path / "figB.png").exists()

    def test_demo_scenarios_run(self, tmp_path):
        res = polarize("reproduce", "duel-demo", "--out-dir", tmp_path, "--quiet",
                       "--no-render")
        assert res.returncode == 0, res.stderr
        series = list(csv.DictReader(open(tmp_path / "duel-demo_series.csv")))
        assert len(series) == 5001
        assert float(series[-1]["max_pair_disagreement"]) < 0.05
        res = polarize("reproduce", "thm31-demo", "--out-dir", tmp_path, "--quiet",
                       "--no-render")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "thm31-demo_metrics.csv")))
        assert float(rows[-1]["max_pair_disagreement"]) < 0.05


class TestStrategy:
    def test_hemisphere_exact_antipodal(self, tmp_path):
        write_points_csv(tmp_path / "pts.csv", np.array([[0.0, 1.0], [0.0, -1.0]]))
        res = polarize("strategy", "hemisphere-exact", "--points",
                       tmp_path / "pts.csv", "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        sol = json.loads((tmp_path / "solution.json").read_text())
        assert sol["count"] == 1 and sol["exact"]

    def test_exact_guard_exit_3(self, tmp_path):
        pts = np.eye(5)
        write_points_csv(tmp_path / "pts.csv", pts)
        res = polarize("strategy", "hemisphere-exact", "--points",
                       tmp_path / "pts.csv", "--out-dir", tmp_path)
        assert res.returncode == 3
        assert "heuristic" in res.stderr

    def test_cap_solution_values(self, tmp_path):
        pts = np.zeros((8, 4))
        pts[:, :3] = np.random.default_rng(1).standard_normal((8, 3))
        pts[:, :3] /= np.linalg.norm(pts[:, :3], axis=1)[:, None]
        write_points_csv(tmp_path / "pts.csv", pts)
        res = polarize("strategy", "cap", "--points", tmp_path / "pts.csv",
                       "--threshold", "0.3", "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        sol = json.loads((tmp_path / "solution.json").read_text())
        assert abs(sol["c"] - 0.821917808219178) < 1e-12
        assert len(sol["schedule"]["vectors"]) == 1

    def test_two_agent_solution(self, tmp_path):
        res = polarize("strategy", "two-agent", "--correlation", "0",
                       "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        sol = json.loads((tmp_path / "solution.json").read_text())
        assert abs(sol["correlation_after"] - 0.3675444679663241) < 1e-12
        assert abs(sol["polarization_cost"] - 0.3675444679663241) < 1e-12

    def test_plan_round_trip(self, tmp_path):
        rng = np.random.default_rng(4)
        pts = rng.standard_normal((6, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        write_points_csv(tmp_path / "pts.csv", pts)
        res = polarize("strategy", "plan", "--points", tmp_path / "pts.csv",
                       "--target", "0,0,1", "--epsilon", "0.001",
                       "--out", "plan.json", "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        sol = json.loads((tmp_path / "plan.json").read_text())
        cfg = base_config(
            agents={"init": "explicit",
                    "opinions": [[float(x) for x in row] for row in pts]},
            steps=0,
        )
        cfg_path = tmp_path / "replay.json"
        cfg_path.write_text(json.dumps(cfg))
        res = polarize("simulate", cfg_path, "--schedule-file", tmp_path / "plan.json",
                       "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "trajectory.csv")))
        tmax = max(int(r["t"]) for r in rows)
        assert tmax == sol["total_steps"] + 1
        target = np.array([0.0, 0.0, 1.0])
        close = []
        for r in rows:
            if int(r["t"]) == tmax:
                u = np.array([float(r["coord_1"]), float(r["coord_2"]),
                              float(r["coord_3"])])
                if np.linalg.norm(u - target) <= 1e-3:
                    close.append(int(r["agent_id"]))
        assert sorted(close) == sol["covered_agents"]

    def test_hemisphere_solution_round_trip(self, tmp_path):
        # the emitted axis replays as a fixed schedule without editing
        rng = np.random.default_rng(8)
        pts = rng.standard_normal((7, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        write_points_csv(tmp_path / "pts.csv", pts)
        res = polarize("strategy", "hemisphere-exact", "--points",
                       tmp_path / "pts.csv", "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        sol = json.loads((tmp_path / "solution.json").read_text())
        cfg = base_config(
            agents={"init": "explicit",
                    "opinions": [[float(x) for x in row] for row in pts]},
            steps=0,
        )
        cfg_path = tmp_path / "replay.json"
        cfg_path.write_text(json.dumps(cfg))
        res = polarize("simulate", cfg_path, "--schedule-file",
                       tmp_path / "solution.json", "--steps", "200",
                       "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(open(tmp_path / "trajectory.csv")))
        tmax = max(int(r["t"]) for r in rows)
        axis = np.array(sol["axis"])
        near_axis = 0
        for r in rows:
            if int(r["t"]) == tmax:
                u = np.array([float(r["coord_1"]), float(r["coord_2"]),
                              float(r["coord_3"])])
                near_axis += np.linalg.norm(u - axis) < 1e-6
        assert near_axis == sol["count"]

    def test_one_agent_solution(self, tmp_path):
        write_points_csv(tmp_path / "pts.csv", np.array([[1.0, 0.0, 0.0]]))
        res = polarize("strategy", "one-agent", "--points", tmp_path / "pts.csv",
                       "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        sol = json.loads((tmp_path / "solution.json").read_text())
        assert sol["achieved_value"] == pytest.approx(1.0 / 3.0, abs=1e-15)


class TestMetricsCommand:
    def test_report_files(self, tmp_path):
        u = np.array([0.6, 0.8])
        write_points_csv(tmp_path / "pts.csv", np.array([u, -u]))
        res = polarize("metrics", "--points", tmp_path / "pts.csv",
                       "--out-dir", tmp_path, "--quiet")
        assert res.returncode == 0, res.stderr
        report = json.loads((tmp_path / "metrics.json").read_text())
        assert report["rho_total"] == pytest.approx(1.0, abs=1e-12)
        assert report["exact"] is True
        rows = list(csv.DictReader(open(tmp_path / "metrics.csv")))
        assert len(rows) == 1 and rows[0]["exact_flag"] == "1"

    def test_bad_points_header_exit_2(self, tmp_path):
        (tmp_path / "pts.csv").write_text("x,y\n1.0,0.0\n")
        res = polarize("metrics", "--points", tmp_path / "pts.csv",
                       "--out-dir", tmp_path)
        assert res.returncode == 2


def test_points_csv_round_trip(tmp_path):
    pts = np.random.default_rng(0).standard_normal((5, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    write_points_csv(tmp_path / "p.csv", pts)
    back = read_points_csv(tmp_path / "p.csv")
    np.testing.assert_array_equal(back, pts)
