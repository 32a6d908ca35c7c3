"""Population evolution under a schedule of interventions.

A run is sequential (each step depends on the last); independent runs with
different seeds or configs can execute in parallel since states and
trajectories are value objects.  One RNG stream drives a run and is consumed
in a fixed order: the schedule draw for step t happens before anything else
at that step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError
from .geometry import (
    _intervene_rows,
    as_unit_rows,
    as_unit_vector,
    check_eta,
    intervene_many,
    sample_uniform_sphere,
)
from .metrics import max_pair_disagreement


@dataclass(frozen=True)
class PopulationState:
    """Opinions of all agents at one time step (t counts from 1)."""

    opinions: np.ndarray
    t: int = 1
    eta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "opinions", as_unit_rows(self.opinions).copy())
        if self.t < 1:
            raise GuardError(f"time step must be >= 1, got {self.t}")
        check_eta(self.eta)

    @property
    def n(self) -> int:
        return self.opinions.shape[0]

    @property
    def d(self) -> int:
        return self.opinions.shape[1]


class Schedule:
    """Rule producing the intervention vector for each time step."""

    def validate(self, d: int) -> None:  # pragma: no cover - trivial default
        pass

    def draw(self, t: int, d: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class FixedSchedule(Schedule):
    def __init__(self, v):
        self.v = as_unit_vector(v)

    def validate(self, d: int) -> None:
        as_unit_vector(self.v, dim=d)

    def draw(self, t, d, rng):
        return self.v


class IIDUniformSchedule(Schedule):
    """A fresh uniform-sphere intervention at every step."""

    def draw(self, t, d, rng):
        return sample_uniform_sphere(d, rng)


def _check_pair(v, v_prime):
    v = as_unit_vector(v)
    v_prime = as_unit_vector(v_prime, dim=v.shape[0])
    if min(np.linalg.norm(v - v_prime), np.linalg.norm(v + v_prime)) <= 1e-12:
        raise GuardError("pair schedules need v != +-v'")
    return v, v_prime


class AlternatingPairSchedule(Schedule):
    """First vector at odd t, second at even t."""

    def __init__(self, v, v_prime):
        self.v, self.v_prime = _check_pair(v, v_prime)

    def validate(self, d):
        as_unit_vector(self.v, dim=d)

    def draw(self, t, d, rng):
        return self.v if t % 2 == 1 else self.v_prime


class RandomPairSchedule(Schedule):
    """Each step independently picks the first vector with probability p."""

    def __init__(self, v, v_prime, p: float = 0.5):
        self.v, self.v_prime = _check_pair(v, v_prime)
        if not 0.0 < p < 1.0:
            raise GuardError(f"p must lie in (0, 1), got {p}")
        self.p = float(p)

    def validate(self, d):
        as_unit_vector(self.v, dim=d)

    def draw(self, t, d, rng):
        return self.v if rng.random() < self.p else self.v_prime


class ExplicitSchedule(Schedule):
    """Plays back a preset sequence of interventions."""

    def __init__(self, vectors):
        self.vectors = as_unit_rows(vectors)

    def validate(self, d):
        if self.vectors.shape[1] != d:
            raise GuardError(
                f"explicit schedule dimension {self.vectors.shape[1]} != population {d}"
            )

    def draw(self, t, d, rng):
        if t > self.vectors.shape[0]:
            raise GuardError(
                f"explicit schedule exhausted: step {t} > {self.vectors.shape[0]} vectors"
            )
        return self.vectors[t - 1]


class PlanSchedule(ExplicitSchedule):
    """Expansion of a strategy plan into its full intervention sequence."""

    def __init__(self, plan):
        super().__init__(plan.expand())
        self.plan = plan


@dataclass(frozen=True)
class Trajectory:
    """Per-run record: strided opinion snapshots plus every applied intervention."""

    snapshots: list[tuple[int, np.ndarray]]
    applied_interventions: np.ndarray
    seed: int | None
    eta: float
    schedule: Schedule = field(repr=False, default=None)

    def __post_init__(self):
        times = [t for t, _ in self.snapshots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise GuardError("snapshot times must be strictly increasing")
        if self.applied_interventions.shape[0] != times[-1] - times[0]:
            raise GuardError(
                f"{self.applied_interventions.shape[0]} interventions recorded "
                f"for steps t={times[0]}..{times[-1]}"
            )

    @property
    def final_t(self) -> int:
        return self.snapshots[-1][0]

    @property
    def final_opinions(self) -> np.ndarray:
        return self.snapshots[-1][1]

    @property
    def initial_opinions(self) -> np.ndarray:
        return self.snapshots[0][1]


def step(state: PopulationState, v) -> PopulationState:
    """Apply one intervention to every agent and advance the clock."""
    v = as_unit_vector(v, dim=state.d)
    return PopulationState(
        opinions=intervene_many(state.opinions, v, state.eta),
        t=state.t + 1,
        eta=state.eta,
    )


def _snapshot_due(t: int, stride) -> bool:
    if stride == "auto":
        # Dense early history, sparse tail: every step to t=100, then tenths.
        return t <= 100 or t % 10 == 0
    return (t - 1) % int(stride) == 0


def converged_pairs(opinions, epsilon: float) -> bool:
    """True iff every pair agrees or antipodally agrees within epsilon."""
    if epsilon <= 0:
        raise GuardError(f"epsilon must be positive, got {epsilon}")
    return max_pair_disagreement(opinions) < epsilon


def run(
    initial: PopulationState,
    schedule: Schedule,
    steps: int,
    seed: int | None = None,
    *,
    stride="auto",
    stop_when_converged: bool = False,
    convergence_epsilon: float = 0.05,
    convergence_check_every: int = 50,
) -> Trajectory:
    """Drive ``steps`` interventions from the schedule, recording a trajectory.

    Deterministic given (initial, schedule, seed).  ``stride`` is a positive
    int or "auto" (every step up to t=100, then every 10th); the initial and
    final states are always snapshotted.  With ``stop_when_converged`` the
    run ends early once all pairs agree within ``convergence_epsilon``,
    checked every ``convergence_check_every`` steps.
    """
    if steps < 0:
        raise GuardError(f"steps must be >= 0, got {steps}")
    if stride != "auto" and int(stride) < 1:
        raise GuardError(f"stride must be >= 1, got {stride}")
    schedule.validate(initial.d)
    rng = np.random.default_rng(seed)
    opinions = initial.opinions.copy()
    t = initial.t
    eta = initial.eta
    snapshots = [(t, opinions.copy())]
    applied = np.empty((steps, initial.d), dtype=np.float64)
    taken = 0
    for k in range(steps):
        # Schedules emit validated unit vectors, so the fast path is safe.
        v = schedule.draw(t, initial.d, rng)
        opinions = _intervene_rows(opinions, v, eta)
        t += 1
        applied[k] = v
        taken = k + 1
        if _snapshot_due(t, stride):
            snapshots.append((t, opinions.copy()))
        if (
            stop_when_converged
            and taken % convergence_check_every == 0
            and converged_pairs(opinions, convergence_epsilon)
        ):
            break
    if snapshots[-1][0] != t:
        snapshots.append((t, opinions.copy()))
    return Trajectory(
        snapshots=snapshots,
        applied_interventions=applied[:taken],
        seed=seed,
        eta=eta,
        schedule=schedule,
    )
