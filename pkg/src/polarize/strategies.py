"""Influencer optimization: densest hemisphere / spherical cap, the labeled
halfspace-agreement reduction, consensus-then-nudge plans, and the closed-form
single-shot interventions.

Boundary rule used throughout: a point with |<x, axis> - threshold| <= 1e-12
counts as *outside* an open hemisphere or cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GuardError
from .geometry import (
    UNIT_TOL,
    angle,
    as_unit_rows,
    as_unit_vector,
    check_eta,
    intervene_many,
    sample_uniform_sphere,
)

BOUNDARY_TOL = 1e-12

# O(n^d) candidate enumeration blows up past this; callers are pointed at the
# heuristic instead.
EXACT_DIMENSION_LIMIT = 4


@dataclass(frozen=True)
class Hemisphere:
    """Open homogeneous halfspace {x : <x, axis> > 0} intersected with the sphere."""

    axis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "axis", as_unit_vector(self.axis).copy())


@dataclass(frozen=True)
class SphericalCap:
    """Cap {x : <x, axis> > threshold} on the sphere one dimension down."""

    axis: np.ndarray
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "axis", np.asarray(self.axis, dtype=np.float64).copy())
        if not 0.0 <= self.threshold < 1.0:
            raise GuardError(f"cap threshold must lie in [0, 1), got {self.threshold}")


@dataclass(frozen=True)
class LabeledPoint:
    """A point in R^d with a binary label, input of the agreement problem."""

    x: np.ndarray
    y: int

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64).copy())
        if self.y not in (-1, 1):
            raise GuardError(f"label must be -1 or +1, got {self.y!r}")


@dataclass(frozen=True)
class InterventionPlan:
    """Consensus-then-nudge plan: repeat the hemisphere axis, then walk waypoints.

    ``phase1`` is (axis, repeat count); ``phase2`` lists (waypoint, repeat
    count) pairs ending at the target.  ``covered`` holds the indices of the
    agents inside the chosen hemisphere, which is exactly the converging set.
    """

    phase1: tuple[np.ndarray, int]
    phase2: tuple[tuple[np.ndarray, int], ...]
    epsilon: float
    covered: np.ndarray

    def __post_init__(self):
        axis, count = self.phase1
        chain = [as_unit_vector(axis)]
        if count < 0:
            raise GuardError("negative repeat count")
        for w, k in self.phase2:
            chain.append(as_unit_vector(w, dim=chain[0].shape[0]))
            if k < 0:
                raise GuardError("negative repeat count")
        for a, b in zip(chain, chain[1:]):
            if float(a @ b) <= 0.0:
                raise GuardError("consecutive plan waypoints must correlate positively")
        if self.epsilon <= 0:
            raise GuardError("epsilon must be positive")

    @property
    def dimension(self) -> int:
        return self.phase1[0].shape[0]

    def expand(self) -> np.ndarray:
        """Full intervention sequence, one row per step."""
        parts = [np.tile(v, (k, 1)) for v, k in (self.phase1, *self.phase2) if k > 0]
        if not parts:
            return np.empty((0, self.dimension))
        return np.vstack(parts)

    @property
    def total_steps(self) -> int:
        return self.phase1[1] + sum(k for _, k in self.phase2)


def hemisphere_count(points, axis, threshold: float = 0.0) -> int:
    """Number of points strictly inside the open hemisphere/cap around ``axis``."""
    pts = np.asarray(points, dtype=np.float64)
    axis = np.asarray(axis, dtype=np.float64)
    return int(np.count_nonzero(pts @ axis > threshold + BOUNDARY_TOL))


class _BestTracker:
    """Keeps the densest candidate; ties fall to the smallest defining index tuple."""

    def __init__(self, pts: np.ndarray, threshold: float):
        self.pts = pts
        self.threshold = threshold
        self.count = -1
        self.axis = None
        self.key: tuple = ()

    def consider(self, axis: np.ndarray, key: tuple) -> None:
        c = hemisphere_count(self.pts, axis, self.threshold)
        if c > self.count or (c == self.count and key < self.key):
            self.count = c
            self.axis = axis.copy()
            self.key = key


def _null_and_particular(U: np.ndarray, c: float):
    """Min-norm solution of U v = c*1 plus the unit null direction, or None.

    U is (m-1, m); returns None when U is rank deficient (a degenerate
    candidate subset that smaller subsets or per-point candidates cover).
    """
    u_svd, s, vt = np.linalg.svd(U, full_matrices=True)
    if s[-1] <= 1e-12 * max(1.0, s[0]):
        return None
    rhs = np.full(U.shape[0], c)
    v_p = vt[:-1].T @ ((u_svd.T @ rhs) / s)
    return v_p, vt[-1]


_EPS_LADDER = (3e-2, 1e-3, 1e-5, 1e-7)


def _vertex_candidates(tracker: _BestTracker, subset: tuple, U: np.ndarray,
                       c: float, patterns=None) -> None:
    """Enumerate the arrangement vertices pinned by ``subset`` and perturb off them.

    A vertex is a direction v with <u_i, v> = c for all i in the subset.  For
    every sign pattern we solve for a tangent direction p with <u_i, p> = +-1
    and nudge v along it; the realized (recounted) axes are what compete.
    """
    pts = tracker.pts
    sol = _null_and_particular(U, c)
    if sol is None:
        return
    v_p, z = sol
    disc = 1.0 - float(v_p @ v_p)
    if disc < -1e-12:
        return
    t = float(np.sqrt(max(disc, 0.0)))
    bases = [v_p + t * z] if t < 1e-12 else [v_p + t * z, v_p - t * z]
    if patterns is None:
        patterns = list(itertools.product((1.0, -1.0), repeat=U.shape[0]))
    for base in bases:
        nb = float(np.linalg.norm(base))
        if nb < 1e-12:
            continue
        base = base / nb
        tracker.consider(base, subset)
        for signs in patterns:
            a_mat = np.vstack([U, base[None, :]])
            b_vec = np.array([*signs, 0.0])
            try:
                p = np.linalg.solve(a_mat, b_vec)
            except np.linalg.LinAlgError:
                continue
            for eps in _EPS_LADDER:
                cand = base + eps * p
                cand /= np.linalg.norm(cand)
                tracker.consider(cand, subset)


def _densest_direction_exact(pts: np.ndarray, threshold: float):
    """Exhaustive candidate search for the densest open hemisphere (threshold 0)
    or fixed-threshold cap.  Exact for points in general position; per-point
    and subset-mean candidates keep degenerate inputs (repeated or antipodal
    points, low-rank spans) correct as well."""
    n, m = pts.shape
    tracker = _BestTracker(pts, threshold)
    if m == 1:
        for val, key in ((1.0, (0,)), (-1.0, (1,))):
            tracker.consider(np.array([val]), key)
        return tracker
    for i in range(n):
        tracker.consider(pts[i], (i,))
    # Spherically-convex regions without arrangement vertices are anchored by
    # subset means (e.g. a lens whose boundary circles do not meet a third).
    for size in range(2, m):
        for subset in itertools.combinations(range(n), size):
            mean = pts[list(subset)].sum(axis=0)
            norm = float(np.linalg.norm(mean))
            if norm > 1e-12:
                tracker.consider(mean / norm, subset)
    if m >= 2:
        for subset in itertools.combinations(range(n), m - 1):
            _vertex_candidates(tracker, subset, pts[list(subset)], threshold)
    return tracker


def densest_hemisphere_exact(points) -> tuple[Hemisphere, int]:
    """Exact densest open hemisphere for dimension <= 4.

    Enumerates candidate axes from all (d-1)-point arrangement vertices with
    sign perturbations; every candidate is recounted, so the returned count is
    the true number of points strictly inside.  Ties break towards the
    lexicographically smallest defining index tuple.
    """
    pts = as_unit_rows(points)
    n, d = pts.shape
    if n < 1:
        raise GuardError("need at least one point")
    if d > EXACT_DIMENSION_LIMIT:
        raise GuardError(
            f"exact search is limited to d <= {EXACT_DIMENSION_LIMIT} "
            f"(got d={d}); use densest_hemisphere_heuristic"
        )
    tracker = _densest_direction_exact(pts, 0.0)
    return Hemisphere(tracker.axis), tracker.count


def _mean_shift(pts: np.ndarray, axis: np.ndarray, tracker: _BestTracker,
                key: tuple, max_iter: int) -> np.ndarray:
    """Move the axis to the normalized mean of its interior points until stable."""
    for _ in range(max_iter):
        tracker.consider(axis, key)
        inside = pts @ axis > tracker.threshold + BOUNDARY_TOL
        if not inside.any():
            break
        shifted = pts[inside].mean(axis=0)
        norm = float(np.linalg.norm(shifted))
        if norm < 1e-12:
            break
        shifted /= norm
        if float(np.linalg.norm(shifted - axis)) < 1e-12:
            break
        axis = shifted
    return axis


def densest_hemisphere_heuristic(points, restarts: int = 32, seed=0,
                                 max_iter: int = 64, polish_axes: int = 4,
                                 polish_pool: int = 10) -> tuple[Hemisphere, int]:
    """Multi-restart ascent for the densest open hemisphere.

    Mean-shift (axis -> normalized mean of interior points) from every input
    point plus ``restarts`` random starts, followed by a vertex polish: around
    the best stalls, the arrangement vertices pinned by the ``polish_pool``
    smallest-margin points are enumerated the same way the exact solver does.
    Mean-shift alone plateaus well short of the optimum; the polish step is
    what makes small-instance results nearly always exact.  Every input point
    is a start, so the count never falls below the best single-point-axis
    baseline, and the returned count is always a recount of the actual axis.
    """
    pts = as_unit_rows(points)
    n, d = pts.shape
    if n < 1:
        raise GuardError("need at least one point")
    rng = np.random.default_rng(seed)
    tracker = _BestTracker(pts, 0.0)
    starts = [pts[i] for i in range(n)]
    if restarts > 0:
        starts.extend(sample_uniform_sphere(d, rng, size=restarts))
    stalls = []
    for idx, axis in enumerate(starts):
        final = _mean_shift(pts, np.array(axis), tracker, (idx,), max_iter)
        stalls.append((hemisphere_count(pts, final), final))
    if d >= 2:
        stalls.sort(key=lambda item: -item[0])
        size = d - 1
        patterns = None
        if 2 ** size > 16:
            patterns = [(1.0,) * size, (-1.0,) * size]
        seen_axes: set = set()
        seen_subsets: set = set()
        for cnt, axis in stalls:
            fingerprint = tuple(np.round(axis, 6))
            if fingerprint in seen_axes:
                continue
            seen_axes.add(fingerprint)
            if len(seen_axes) > polish_axes:
                break
            margins = np.abs(pts @ axis)
            pool = np.sort(np.argsort(margins)[:polish_pool])
            for subset in itertools.combinations(pool.tolist(), size):
                if subset in seen_subsets:
                    continue
                seen_subsets.add(subset)
                _vertex_candidates(tracker, subset, pts[list(subset)], 0.0,
                                   patterns=patterns)
    return Hemisphere(tracker.axis), tracker.count


def hemisphere_feasible(points) -> bool:
    """True iff some open hemisphere contains every point (d <= 4).

    Equivalent to the zero vector lying outside the convex hull of the points.
    """
    pts = as_unit_rows(points)
    _, count = densest_hemisphere_exact(pts)
    return count == pts.shape[0]


# ---------------------------------------------------------------------------
# Reduction between halfspace agreement and hemisphere density


def reduce_agreement_to_hemisphere(data) -> np.ndarray:
    """Map labeled points (x_i, y_i) to unit vectors (y_i x_i, 1)/sqrt(1+|x_i|^2).

    Halfspaces {x : <x,a> > c} for the labeled instance correspond one-to-one
    to homogeneous halfspaces with axis (a, -c) for the image, preserving the
    agreement count as the hemisphere count.
    """
    rows = []
    for p in data:
        if not isinstance(p, LabeledPoint):
            p = LabeledPoint(np.asarray(p[0]), int(p[1]))
        scale = 1.0 / np.sqrt(1.0 + float(p.x @ p.x))
        rows.append(scale * np.concatenate([p.y * p.x, [1.0]]))
    if not rows:
        return np.empty((0, 1))
    return np.vstack(rows)


def halfspace_to_hemisphere_axis(a, c: float) -> np.ndarray:
    """The hemisphere axis (a, -c), normalized, matching a labeled halfspace."""
    a = np.asarray(a, dtype=np.float64)
    axis = np.concatenate([a, [-float(c)]])
    norm = float(np.linalg.norm(axis))
    if norm < 1e-12:
        raise GuardError("halfspace (a, c) must not be identically zero")
    return axis / norm


def halfspace_agreement_count(data, a, c: float) -> int:
    """Number of labeled points with y_i * x_i strictly inside {<x,a> > c}."""
    total = 0
    a = np.asarray(a, dtype=np.float64)
    for p in data:
        if not isinstance(p, LabeledPoint):
            p = LabeledPoint(np.asarray(p[0]), int(p[1]))
        if float((p.y * p.x) @ a) > c:
            total += 1
    return total


# ---------------------------------------------------------------------------
# Consensus-then-nudge planning


def _orthonormal_to(a: np.ndarray) -> np.ndarray:
    """A deterministic unit vector orthogonal to ``a``."""
    k = int(np.argmin(np.abs(a)))
    e = np.zeros_like(a)
    e[k] = 1.0
    w = e - float(e @ a) * a
    return w / np.linalg.norm(w)


def _drive(cluster: np.ndarray, w: np.ndarray, eta: float, goal: float,
           budget: int) -> tuple[np.ndarray, int]:
    """Repeat intervention ``w`` until every cluster point is within ``goal``."""
    steps = 0
    while float(np.max(np.linalg.norm(cluster - w[None, :], axis=1))) > goal:
        if steps >= budget:
            raise GuardError(
                "intervention budget exhausted while concentrating the cluster; "
                "a point has a vanishing hemisphere margin"
            )
        cluster = intervene_many(cluster, w, eta)
        steps += 1
    return cluster, steps


def _chord(angle_rad: float) -> float:
    return 2.0 * float(np.sin(angle_rad / 2.0))


def plan_convergence(points, target, eta: float = 1.0, epsilon: float = 1e-3,
                     *, hop: float = np.pi / 8,
                     max_steps: int = 200_000) -> InterventionPlan:
    """Plan interventions converging every coverable agent to ``target``.

    Phase 1 repeats the densest-hemisphere axis until the covered agents
    cluster tightly; phase 2 walks them along the geodesic towards the target
    in hops of at most ``hop`` (a single direct hop when the target already
    correlates positively with the axis), finishing within ``epsilon``.
    Repeat counts are fixed by simulating the deterministic dynamics during
    planning, so replaying the expanded plan reproduces the outcome.
    """
    pts = as_unit_rows(points)
    n, d = pts.shape
    target = as_unit_vector(target, dim=d)
    eta = check_eta(eta)
    if epsilon <= 0:
        raise GuardError("epsilon must be positive")
    if d <= EXACT_DIMENSION_LIMIT:
        hemi, count = densest_hemisphere_exact(pts)
    else:
        hemi, count = densest_hemisphere_heuristic(pts)
    axis = hemi.axis
    covered = np.flatnonzero(pts @ axis > BOUNDARY_TOL)
    if covered.size == 0:
        raise GuardError("no open hemisphere holds any point in its interior")

    gamma = angle(axis, target)
    if float(np.linalg.norm(target - axis)) <= 1e-9:
        waypoints: list[np.ndarray] = []
        first_hop = 0.0
    elif float(axis @ target) > 0.0:
        waypoints = [target]
        first_hop = gamma
    else:
        sin_gamma = float(np.sin(gamma))
        if sin_gamma < 1e-9:
            side = _orthonormal_to(axis)
        else:
            side = (target - float(np.cos(gamma)) * axis) / sin_gamma
        hops = int(np.ceil(gamma / hop))
        angles = gamma * np.arange(1, hops + 1) / hops
        waypoints = [np.cos(a) * axis + np.sin(a) * side for a in angles[:-1]]
        waypoints.append(target)
        first_hop = gamma / hops

    # Tightness targets: intermediate clusters stay within pi/16 of their
    # waypoint (so the next hop keeps every point at an acute angle to it),
    # the final stage lands inside epsilon with a factor-2 margin.
    mid_goal = min(epsilon / 4.0, _chord(np.pi / 16))
    final_goal = epsilon / 2.0
    if waypoints:
        allowed = 0.9 * (np.pi / 2.0 - first_hop)
        phase1_goal = min(mid_goal, _chord(max(allowed, 1e-6)))
    else:
        phase1_goal = min(mid_goal, final_goal)

    cluster = pts[covered]
    budget = max_steps
    cluster, k1 = _drive(cluster, axis, eta, phase1_goal, budget)
    budget -= k1
    phase2: list[tuple[np.ndarray, int]] = []
    for j, w in enumerate(waypoints):
        goal = final_goal if j == len(waypoints) - 1 else mid_goal
        cluster, k = _drive(cluster, w, eta, goal, budget)
        budget -= k
        phase2.append((w, k))
    return InterventionPlan(
        phase1=(axis, k1),
        phase2=tuple(phase2),
        epsilon=epsilon,
        covered=covered,
    )


# ---------------------------------------------------------------------------
# Closed-form single-shot interventions (intervention strength fixed at 1)


def _require_unit_eta(eta: float) -> None:
    if abs(float(eta) - 1.0) > 1e-12:
        raise GuardError("closed-form single-shot interventions require eta = 1")


class TwoAgentResult(NamedTuple):
    cos_sq_tilt: float          # squared cosine of the tilt out of the opinion plane
    achieved: float             # both agents' new coordinate on the promoted topic
    correlation_after: float    # correlation between the two agents afterwards


def two_agent_intervention(c: float) -> TwoAgentResult:
    """Optimal single intervention lifting *both* agents equally.

    ``c`` is the initial correlation between the two agents (both neutral on
    the promoted topic).  Closed forms; degenerate at c = -1 where antipodal
    agents admit no joint gain.
    """
    c = float(c)
    if not -1.0 < c <= 1.0:
        raise GuardError(f"correlation must lie in (-1, 1], got {c}")
    cos_sq = np.sqrt(2.0) * (np.sqrt(3.0 * c + 5.0) - np.sqrt(2.0)) / (3.0 * (c + 1.0))
    achieved = np.sqrt(
        max(0.0, (3.0 * c + 7.0 - 2.0 * np.sqrt(6.0 * c + 10.0)) / (9.0 * (c + 1.0)))
    )
    corr = 1.0 - np.sqrt(2.0) * (1.0 - c) / np.sqrt(3.0 * c + 5.0)
    return TwoAgentResult(float(cos_sq), float(achieved), float(corr))


def two_agent_vectors(c: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Canonical 3-D frame realizing the two-agent intervention.

    Returns (u1, u2, v): two unit opinions with correlation ``c`` and zero
    final coordinate, plus the optimal joint intervention.
    """
    res = two_agent_intervention(c)
    half = np.arccos(np.clip(c, -1.0, 1.0)) / 2.0
    u1 = np.array([np.sin(half), np.cos(half), 0.0])
    u2 = np.array([-np.sin(half), np.cos(half), 0.0])
    cos_b = np.sqrt(np.clip(res.cos_sq_tilt, 0.0, 1.0))
    v = np.array([0.0, cos_b, np.sqrt(max(0.0, 1.0 - cos_b * cos_b))])
    return u1, u2, v


def one_agent_intervention(u1, eta: float = 1.0) -> tuple[np.ndarray, float]:
    """Optimal single intervention for one agent neutral on the last topic.

    Mixes the agent's own opinion with the promoted axis at fixed weights
    sqrt(1/3) and sqrt(2/3); the agent's new last coordinate is exactly 1/3
    regardless of its starting opinion.
    """
    _require_unit_eta(eta)
    u1 = as_unit_vector(u1)
    if abs(float(u1[-1])) > UNIT_TOL:
        raise GuardError("the agent must start neutral on the promoted topic")
    e_last = np.zeros_like(u1)
    e_last[-1] = 1.0
    v = np.sqrt(1.0 / 3.0) * u1 + np.sqrt(2.0 / 3.0) * e_last
    v /= np.linalg.norm(v)
    return v, 1.0 / 3.0


def one_agent_other_value(c: float) -> float:
    """New last coordinate of the *other* agent after a one-agent intervention."""
    c = float(c)
    return c * np.sqrt(2.0) / (3.0 * np.sqrt(1.0 + c * c))


def correlation_after_one_agent(c: float) -> float:
    """Correlation between the two agents after the one-agent intervention."""
    c = float(c)
    return c * np.sqrt(2.0) / np.sqrt(c * c + 1.0)


def correlation_after_two_agent(c: float) -> float:
    """Correlation between the two agents after the two-agent intervention."""
    return two_agent_intervention(c).correlation_after


def polarization_cost(c: float) -> float:
    """Correlation gap between the two-agent and one-agent interventions (>= 0)."""
    c = float(c)
    if not -1.0 < c <= 1.0:
        raise GuardError(f"correlation must lie in (-1, 1], got {c}")
    return correlation_after_two_agent(c) - correlation_after_one_agent(c)


# ---------------------------------------------------------------------------
# One intervention, many agents: densest spherical cap


def uplift(c_i: float, z: float) -> float:
    """New last coordinate of an agent at correlation ``c_i`` with the cap axis,
    when the intervention is tilted with in-plane weight ``z``."""
    c_i = float(c_i)
    z = float(z)
    if not -1.0 <= c_i <= 1.0:
        raise GuardError(f"correlation must lie in [-1, 1], got {c_i}")
    if not 0.0 <= z <= 1.0:
        raise GuardError(f"tilt weight must lie in [0, 1], got {z}")
    return c_i * z * np.sqrt(1.0 - z * z) / np.sqrt(1.0 + 3.0 * c_i * c_i * z * z)


def uplift_best_tilt(c_i: float) -> float:
    """The in-plane weight maximizing ``uplift`` for a fixed positive correlation."""
    c_i = float(c_i)
    return 1.0 / np.sqrt(1.0 + np.sqrt(1.0 + 3.0 * c_i * c_i))


def uplift_max(c_i: float) -> float:
    """Stationary value of ``uplift`` over the tilt (the maximum for c_i >= 0)."""
    c_i = float(c_i)
    return c_i / (1.0 + np.sqrt(1.0 + 3.0 * c_i * c_i))


def cap_parameters(threshold: float) -> tuple[float, float, float]:
    """Correlation floor, in-plane weight, and tilt angle for a target threshold.

    The agents an intervention can push past ``threshold`` on the promoted
    topic are exactly those within the cap {<u*, axis> > c}; 1/3 is the
    supremum any single intervention can reach, so threshold < 1/3.
    """
    t = float(threshold)
    if not 0.0 <= t < 1.0 / 3.0:
        raise GuardError(f"threshold must lie in [0, 1/3), got {t}")
    c = 2.0 * t / (1.0 - 3.0 * t * t)
    z = 1.0 / np.sqrt(1.0 + np.sqrt(1.0 + 3.0 * c * c))
    return c, z, float(np.arccos(z))


class CapResult(NamedTuple):
    intervention: np.ndarray
    cap: SphericalCap
    count: int
    exact: bool


def _densest_cap(pts_star: np.ndarray, c: float, restarts: int, seed):
    n, m = pts_star.shape
    if m <= EXACT_DIMENSION_LIMIT:
        tracker = _densest_direction_exact(pts_star, c)
        return tracker.axis, tracker.count, True
    rng = np.random.default_rng(seed)
    tracker = _BestTracker(pts_star, c)
    starts = [pts_star[i] for i in range(n)]
    starts.extend(sample_uniform_sphere(m, rng, size=restarts))
    for idx, axis in enumerate(starts):
        _mean_shift(pts_star, np.array(axis), tracker, (idx,), 64)
    return tracker.axis, tracker.count, False


def spherical_cap_intervention(points, threshold: float, *, eta: float = 1.0,
                               restarts: int = 32, seed=0) -> CapResult:
    """Single intervention maximizing the agents pushed past ``threshold``.

    All agents must start neutral on the last topic.  The search for the cap
    axis is exact (vertex enumeration) when the reduced dimension is <= 4 and
    mean-shift ascent with restarts otherwise; the count is always a recount
    against the returned axis.
    """
    _require_unit_eta(eta)
    pts = as_unit_rows(points)
    n, d = pts.shape
    if np.any(np.abs(pts[:, -1]) > UNIT_TOL):
        raise GuardError("all agents must start neutral on the promoted topic")
    c, z, _beta = cap_parameters(threshold)
    star = pts[:, :-1]
    norms = np.linalg.norm(star, axis=1)
    star = star / norms[:, None]
    axis, count, exact = _densest_cap(star, c, restarts, seed)
    v = np.concatenate([z * axis, [np.sqrt(max(0.0, 1.0 - z * z))]])
    v /= np.linalg.norm(v)
    return CapResult(v, SphericalCap(axis, c), count, exact)
