"""Scenario configs (JSON) and the canned reproduction scenarios.

A scenario file fully determines a simulation run: dimension, intervention
strength, agent initializer, schedule, steps, and seed.  With the same file
and seed the exported CSVs are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import strategies
from .dynamics import (
    AlternatingPairSchedule,
    ExplicitSchedule,
    FixedSchedule,
    IIDUniformSchedule,
    PopulationState,
    RandomPairSchedule,
    Schedule,
    Trajectory,
    run,
)
from .errors import ConfigError, GuardError
from .export import write_csv, write_metrics_csv, write_trajectory_csv
from .geometry import check_eta, critical_angle, pull, sample_uniform_sphere

SCHEMA_VERSION = 1

FIGURE_IDS = ("fig1", "figB", "fig2-3", "fig5", "thm31-demo", "duel-demo")


@dataclass
class ScenarioConfig:
    dimension: int
    eta: float
    n_agents: int
    init: str                      # uniform-sphere | uniform-sphere-with-zero-last-k | explicit
    zero_last_k: int
    explicit_opinions: np.ndarray | None
    schedule: Schedule
    steps: int
    seed: int | None
    stride: object                 # int or "auto"
    trajectory_path: str
    metrics_path: str


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _get(obj: dict, field: str, types, default=...):
    if field not in obj:
        if default is ...:
            raise ConfigError(f"missing required field {field!r}")
        return default
    value = obj[field]
    if types is not None and not isinstance(value, types):
        raise ConfigError(f"field {field!r}: expected {types}, got {type(value).__name__}")
    return value


def _parse_vector(obj, field: str, d: int) -> np.ndarray:
    v = np.asarray(obj, dtype=np.float64)
    _require(v.ndim == 1 and v.shape[0] == d,
             f"field {field!r}: expected a vector of length {d}")
    return v


def _build_schedule(raw: dict, d: int) -> Schedule:
    variant = _get(raw, "variant", str)
    try:
        if variant == "fixed":
            return FixedSchedule(_parse_vector(_get(raw, "vector", list), "schedule.vector", d))
        if variant == "iid-uniform":
            return IIDUniformSchedule()
        if variant == "alternating-pair":
            return AlternatingPairSchedule(
                _parse_vector(_get(raw, "first", list), "schedule.first", d),
                _parse_vector(_get(raw, "second", list), "schedule.second", d),
            )
        if variant == "random-pair":
            return RandomPairSchedule(
                _parse_vector(_get(raw, "first", list), "schedule.first", d),
                _parse_vector(_get(raw, "second", list), "schedule.second", d),
                p=float(_get(raw, "p", (int, float), 0.5)),
            )
        if variant == "explicit":
            vectors = np.asarray(_get(raw, "vectors", list), dtype=np.float64)
            _require(vectors.ndim == 2 and vectors.shape[1] == d,
                     f"field 'schedule.vectors': expected rows of length {d}")
            return ExplicitSchedule(vectors)
    except GuardError as exc:
        raise ConfigError(f"schedule: {exc}") from exc
    raise ConfigError(
        f"unknown schedule variant {variant!r}; expected one of "
        "fixed, iid-uniform, alternating-pair, random-pair, explicit"
    )


def parse_scenario(raw: dict, *, seed_override: int | None = None,
                   env_seed: int | None = None,
                   stride_override=None) -> ScenarioConfig:
    """Validate a scenario dict.  Seed priority: override flag > config > env."""
    _require(isinstance(raw, dict), "scenario must be a JSON object")
    version = _get(raw, "version", int)
    _require(version == SCHEMA_VERSION, f"unsupported config version {version}")
    d = _get(raw, "dimension", int)
    _require(d >= 2, "dimension must be >= 2")
    eta = float(_get(raw, "eta", (int, float)))
    try:
        check_eta(eta)
    except GuardError as exc:
        raise ConfigError(str(exc)) from exc
    steps = _get(raw, "steps", int)
    _require(steps >= 0, "steps must be >= 0")

    agents = _get(raw, "agents", dict)
    init = _get(agents, "init", str)
    zero_last_k = 0
    explicit = None
    if init == "explicit":
        explicit = np.asarray(_get(agents, "opinions", list), dtype=np.float64)
        _require(explicit.ndim == 2 and explicit.shape[1] == d,
                 f"agents.opinions must be rows of length {d}")
        n_agents = explicit.shape[0]
    else:
        n_agents = _get(agents, "count", int)
        _require(n_agents >= 1, "agents.count must be >= 1")
        if init == "uniform-sphere-with-zero-last-k":
            zero_last_k = _get(agents, "zero_last_k", int, 1)
            _require(0 < zero_last_k <= d - 2,
                     "agents.zero_last_k must leave at least 2 live dimensions")
        else:
            _require(init == "uniform-sphere",
                     f"unknown agents.init {init!r}")

    schedule = _build_schedule(_get(raw, "schedule", dict), d)

    seed = seed_override
    if seed is None:
        seed = _get(raw, "seed", int, None)
    if seed is None:
        seed = env_seed
    _require(seed is not None,
             "no seed given (flag --seed, config field, or POLARIZE_SEED)")

    stride = stride_override if stride_override is not None else raw.get("stride", "auto")
    if stride != "auto":
        _require(isinstance(stride, int) and stride >= 1,
                 'stride must be a positive integer or "auto"')

    outputs = raw.get("outputs", {})
    _require(isinstance(outputs, dict), "outputs must be an object")
    return ScenarioConfig(
        dimension=d,
        eta=eta,
        n_agents=n_agents,
        init=init,
        zero_last_k=zero_last_k,
        explicit_opinions=explicit,
        schedule=schedule,
        steps=steps,
        seed=int(seed),
        stride=stride,
        trajectory_path=outputs.get("trajectory", "trajectory.csv"),
        metrics_path=outputs.get("metrics", "metrics.csv"),
    )


def load_scenario(path, **kwargs) -> ScenarioConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(raw, **kwargs)


def initial_opinions(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw the starting opinions; consumes the run RNG before any schedule draw."""
    if config.init == "explicit":
        return config.explicit_opinions.copy()
    if config.zero_last_k:
        live = config.dimension - config.zero_last_k
        core = sample_uniform_sphere(live, rng, size=config.n_agents)
        out = np.zeros((config.n_agents, config.dimension))
        out[:, :live] = core
        return out
    return sample_uniform_sphere(config.dimension, rng, size=config.n_agents)


def run_scenario(config: ScenarioConfig) -> Trajectory:
    """Execute a scenario: one RNG stream seeds the initializer, then the run."""
    rng = np.random.default_rng(config.seed)
    opinions = initial_opinions(config, rng)
    try:
        state = PopulationState(opinions, t=1, eta=config.eta)
        init_seed = int(rng.integers(0, 2**63 - 1))
        return run(state, config.schedule, config.steps, seed=init_seed,
                   stride=config.stride)
    except GuardError as exc:
        raise ConfigError(str(exc)) from exc


def simulate_to_files(config: ScenarioConfig, out_dir) -> tuple[Path, Path, Trajectory]:
    out_dir = Path(out_dir)
    trajectory = run_scenario(config)
    traj_path = out_dir / config.trajectory_path
    metr_path = out_dir / config.metrics_path
    write_trajectory_csv(traj_path, trajectory)
    write_metrics_csv(metr_path, trajectory)
    return traj_path, metr_path, trajectory


# ---------------------------------------------------------------------------
# Canned reproduction scenarios


def _single_product_intervention() -> np.ndarray:
    # couples the promoted (4th) topic with the 1st preexisting topic
    return np.array([np.sqrt(7.0) / 4.0, 0.0, 0.0, 3.0 / 4.0])


def _alternating_product_interventions() -> tuple[np.ndarray, np.ndarray]:
    alpha = 3.0 / 4.0
    beta = np.sqrt(1.0 - alpha * alpha)
    v1 = np.array([beta, 0.0, 0.0, alpha, 0.0])
    v2 = np.array([0.0, beta, 0.0, 0.0, alpha])
    return v1, v2


def _reproduce_single_influencer(out_dir: Path, seed: int, stride) -> dict:
    config = ScenarioConfig(
        dimension=4, eta=1.0, n_agents=500,
        init="uniform-sphere-with-zero-last-k", zero_last_k=1,
        explicit_opinions=None,
        schedule=FixedSchedule(_single_product_intervention()),
        steps=5, seed=seed, stride=stride or 1,
        trajectory_path="fig1_trajectory.csv", metrics_path="fig1_metrics.csv",
    )
    traj_path, metr_path, trajectory = simulate_to_files(config, out_dir)
    return {"trajectory": traj_path, "metrics": metr_path,
            "_trajectory_obj": trajectory}


def _reproduce_two_influencers(out_dir: Path, seed: int, stride) -> dict:
    v1, v2 = _alternating_product_interventions()
    config = ScenarioConfig(
        dimension=5, eta=1.0, n_agents=500,
        init="uniform-sphere-with-zero-last-k", zero_last_k=2,
        explicit_opinions=None,
        schedule=AlternatingPairSchedule(v1, v2),
        steps=12, seed=seed, stride=stride or 1,
        trajectory_path="figB_trajectory.csv", metrics_path="figB_metrics.csv",
    )
    traj_path, metr_path, trajectory = simulate_to_files(config, out_dir)
    return {"trajectory": traj_path, "metrics": metr_path,
            "_trajectory_obj": trajectory}


def _reproduce_one_shot_curves(out_dir: Path) -> dict:
    cs = np.round(np.arange(-99, 100) * 0.01, 2)
    header = ["c", "c_one", "c_two", "polarization_cost",
              "two_agent_value", "one_agent_value", "one_agent_other_value"]
    rows = []
    for c in cs:
        res = strategies.two_agent_intervention(float(c))
        rows.append([
            float(c),
            strategies.correlation_after_one_agent(float(c)),
            res.correlation_after,
            strategies.polarization_cost(float(c)),
            res.achieved,
            1.0 / 3.0,
            strategies.one_agent_other_value(float(c)),
        ])
    path = Path(out_dir) / "fig2-3_curves.csv"
    write_csv(path, header, rows)
    return {"curves": path}


def _reproduce_pull_curve(out_dir: Path) -> dict:
    eta = 1.0
    alphas = np.linspace(0.0, np.pi / 2.0, 2001)
    values = pull(alphas, eta)
    header = ["alpha", "pull", "alpha_minus_pull"]
    rows = [[a, f, a - f] for a, f in zip(alphas, values)]
    path = Path(out_dir) / "fig5_curve.csv"
    write_csv(path, header, rows)
    return {"curves": path, "_critical_angle": critical_angle(eta)}


def _reproduce_random_polarization(out_dir: Path, seed: int, stride) -> dict:
    config = ScenarioConfig(
        dimension=3, eta=1.0, n_agents=50,
        init="uniform-sphere", zero_last_k=0, explicit_opinions=None,
        schedule=IIDUniformSchedule(),
        steps=2000, seed=seed, stride=stride or "auto",
        trajectory_path="thm31-demo_trajectory.csv",
        metrics_path="thm31-demo_metrics.csv",
    )
    traj_path, metr_path, trajectory = simulate_to_files(config, out_dir)
    return {"trajectory": traj_path, "metrics": metr_path,
            "_trajectory_obj": trajectory}


def _reproduce_duel(out_dir: Path, seed: int) -> dict:
    from .duel import DuelConfig, duel_diagnostics

    cos_t = 0.8
    v = np.array([1.0, 0.0, 0.0])
    v_prime = np.array([cos_t, np.sqrt(1.0 - cos_t * cos_t), 0.0])
    schedule = RandomPairSchedule(v, v_prime)
    rng = np.random.default_rng(seed)
    opinions = sample_uniform_sphere(3, rng, size=20)
    state = PopulationState(opinions, t=1, eta=1.0)
    trajectory = run(state, schedule, 5000, seed=int(rng.integers(0, 2**63 - 1)),
                     stride="auto")
    config = DuelConfig(v, v_prime, eta=1.0)
    diag = duel_diagnostics(trajectory, config)
    header = ["t", "max_w_norm", "max_pair_disagreement", "agents_in_absorbing_cones"]
    both = (diag.regions == 1) | (diag.regions == 2)
    rows = [
        [str(t + 1), diag.w_norms[t].max(), diag.pair_disagreement[t],
         str(int(both[t].sum()))]
        for t in range(diag.w_norms.shape[0])
    ]
    path = Path(out_dir) / "duel-demo_series.csv"
    write_csv(path, header, rows)
    return {"series": path, "_diagnostics": diag}


def reproduce(figure_id: str, out_dir, *, seed: int | None = None,
              render: bool = True, stride: int | None = None) -> dict:
    """Produce the plot-ready CSV (and rendered PNG) for one canned scenario."""
    if figure_id not in FIGURE_IDS:
        raise ConfigError(
            f"unknown figure id {figure_id!r}; expected one of {', '.join(FIGURE_IDS)}"
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    default_seeds = {"fig1": 1, "figB": 2, "thm31-demo": 3, "duel-demo": 4}
    use_seed = seed if seed is not None else default_seeds.get(figure_id, 0)
    if figure_id == "fig1":
        result = _reproduce_single_influencer(out_dir, use_seed, stride)
    elif figure_id == "figB":
        result = _reproduce_two_influencers(out_dir, use_seed, stride)
    elif figure_id == "fig2-3":
        result = _reproduce_one_shot_curves(out_dir)
    elif figure_id == "fig5":
        result = _reproduce_pull_curve(out_dir)
    elif figure_id == "thm31-demo":
        result = _reproduce_random_polarization(out_dir, use_seed, stride)
    else:
        result = _reproduce_duel(out_dir, use_seed)
    if render:
        from . import plots

        png = plots.render(figure_id, result, out_dir)
        if png is not None:
            result["figure"] = png
    return {k: v for k, v in result.items() if not k.startswith("_")}
