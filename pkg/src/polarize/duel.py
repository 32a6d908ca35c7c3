"""Diagnostics for two dueling influencers broadcasting a fixed pair of messages.

Conventions: the second vector is sign-flipped at construction so the pair
correlates nonnegatively (an intervention and its negation act identically),
putting the angle between them in (0, pi/2].  ``V`` denotes the plane spanned
by the pair, ``W`` its orthogonal complement; the component in W can only
shrink, and the convex cones spanned by (v, v') and (-v, -v') absorb the
in-plane component.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dynamics import AlternatingPairSchedule, RandomPairSchedule, Trajectory
from .errors import GuardError
from .geometry import _intervene_rows, as_unit_rows, as_unit_vector, check_eta, pull

_OBLIQUE_TOL = 1e-12
_ENTRY_MARGIN = 1e-9


class ConeRegion(enum.Enum):
    BOUNDARY = 0
    BOTH = 1          # cone(v, v')
    BOTH_NEG = 2      # cone(-v, -v')
    FIRST_ONLY = 3    # cone(v, -v')
    SECOND_ONLY = 4   # cone(-v, v')


class DuelConfig:
    """Validated pair of dueling interventions with its cached 2-D frame."""

    def __init__(self, v, v_prime, eta: float = 1.0):
        v = as_unit_vector(v).copy()
        v_prime = as_unit_vector(v_prime, dim=v.shape[0]).copy()
        self.eta = check_eta(eta)
        if min(np.linalg.norm(v - v_prime), np.linalg.norm(v + v_prime)) <= 1e-12:
            raise GuardError("duel requires v != +-v'")
        if float(v @ v_prime) < 0.0:
            v_prime = -v_prime
        self.v = v
        self.v_prime = v_prime
        dot = float(np.clip(v @ v_prime, -1.0, 1.0))
        self.theta = float(np.arccos(dot))
        self.e1 = v
        e2 = v_prime - dot * v
        self.e2 = e2 / np.linalg.norm(e2)

    @property
    def d(self) -> int:
        return self.v.shape[0]


@dataclass(frozen=True)
class SpanDecomposition:
    """Split of an opinion into its component in the duel plane and the rest."""

    u_V: np.ndarray
    u_W: np.ndarray
    angle_in_V: float


def decompose(u, config: DuelConfig) -> SpanDecomposition:
    """Orthogonal projection onto the duel plane, frame anchored at ``v``."""
    u = as_unit_vector(u, dim=config.d)
    p1 = float(u @ config.e1)
    p2 = float(u @ config.e2)
    u_v = p1 * config.e1 + p2 * config.e2
    return SpanDecomposition(
        u_V=u_v,
        u_W=u - u_v,
        angle_in_V=float(np.arctan2(p2, p1)),
    )


def _oblique_coords(p1, p2, config: DuelConfig):
    """Coordinates of an in-plane vector in the (generally oblique) {v, v'} basis."""
    sin_t = float(np.sin(config.theta))
    cos_t = float(np.cos(config.theta))
    second = p2 / sin_t
    first = p1 - second * cos_t
    return first, second


def cone_membership(u_v, config: DuelConfig) -> ConeRegion:
    """Which of the four cones of {+-v, +-v'} holds the in-plane vector ``u_v``.

    A coordinate within 1e-12 of zero classifies as BOUNDARY; the zero vector
    is rejected.
    """
    u_v = np.asarray(u_v, dtype=np.float64)
    p1 = float(u_v @ config.e1)
    p2 = float(u_v @ config.e2)
    if np.hypot(p1, p2) <= _OBLIQUE_TOL:
        raise GuardError("cone membership is undefined for a zero in-plane component")
    first, second = _oblique_coords(p1, p2, config)
    if abs(first) <= _OBLIQUE_TOL or abs(second) <= _OBLIQUE_TOL:
        return ConeRegion.BOUNDARY
    if first > 0 and second > 0:
        return ConeRegion.BOTH
    if first < 0 and second < 0:
        return ConeRegion.BOTH_NEG
    if first > 0:
        return ConeRegion.FIRST_ONLY
    return ConeRegion.SECOND_ONLY


def xi_bound(c: float, config: DuelConfig) -> float:
    """Guaranteed per-step shrink factor witness for the out-of-plane norm.

    With probability at least 1/2 one step multiplies |u_W|^2 by at most
    (1 - xi) where xi = min(1/2, (eta + eta^2/2) * c^2 * theta^2 / 16) and c
    is the in-plane norm.
    """
    c = float(c)
    if not 0.0 <= c <= 1.0:
        raise GuardError(f"in-plane norm must lie in [0, 1], got {c}")
    eta = config.eta
    return min(0.5, (eta + eta * eta / 2.0) * c * c * config.theta ** 2 / 16.0)


@dataclass(frozen=True)
class ContractionCertificate:
    is_contractive: bool
    empirical_k: float
    threshold: float


def contraction_certificate(config: DuelConfig,
                            grid: int = 1000) -> ContractionCertificate:
    """Contraction test for the in-plane angle map.

    ``is_contractive`` is the analytic condition cos(theta) > 1/sqrt(2+eta);
    ``empirical_k`` is the largest difference quotient of the angle map over
    all pairs of a ``grid``-point mesh of [0, theta], which stays below 1
    whenever the condition holds.
    """
    threshold = 1.0 / np.sqrt(2.0 + config.eta)
    alphas = np.linspace(0.0, config.theta, grid)
    values = pull(alphas, config.eta)
    df = values[None, :] - values[:, None]
    da = alphas[None, :] - alphas[:, None]
    iu = np.triu_indices(grid, k=1)
    k_emp = float(np.max(np.abs(df[iu]) / da[iu]))
    return ContractionCertificate(
        is_contractive=bool(np.cos(config.theta) > threshold),
        empirical_k=k_emp,
        threshold=float(threshold),
    )


def cone_distance(u, config: DuelConfig) -> float:
    """Euclidean distance from ``u`` to cone(v,v') union cone(-v,-v')."""
    u = as_unit_vector(u, dim=config.d)
    p1 = float(u @ config.e1)
    p2 = float(u @ config.e2)
    w_sq = max(0.0, 1.0 - p1 * p1 - p2 * p2)
    best = np.inf
    for sign in (1.0, -1.0):
        q1, q2 = sign * p1, sign * p2
        first, second = _oblique_coords(q1, q2, config)
        if first >= 0.0 and second >= 0.0:
            in_plane = 0.0
        else:
            in_plane = np.inf
            for ray1, ray2 in ((1.0, 0.0), (np.cos(config.theta), np.sin(config.theta))):
                t = max(0.0, q1 * ray1 + q2 * ray2)
                in_plane = min(
                    in_plane, np.hypot(q1 - t * ray1, q2 - t * ray2)
                )
        best = min(best, float(np.sqrt(in_plane ** 2 + w_sq)))
    return best


@dataclass(frozen=True)
class DuelDiagnostics:
    """Per-step series replayed from a duel trajectory.

    Row t of each array describes the state at time step t+first_t; region
    codes are ConeRegion values.
    """

    w_norms: np.ndarray            # (T+1, n)
    regions: np.ndarray            # (T+1, n) int8 ConeRegion codes
    sign_first: np.ndarray         # (T+1, n) sign(<u, v>)
    sign_second: np.ndarray        # (T+1, n) sign(<u, v'>)
    pair_disagreement: np.ndarray  # (T+1,) max over pairs of min(+-) distance
    config: DuelConfig = field(repr=False)

    def w_monotone(self, slack: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.w_norms, axis=0) <= slack))

    def absorption_ok(self) -> bool:
        """Once an agent sits in cone(v,v') or cone(-v,-v'), it must stay there."""
        ok = True
        both = (self.regions == ConeRegion.BOTH.value) | (
            self.regions == ConeRegion.BOTH_NEG.value
        )
        for i in range(self.regions.shape[1]):
            entered = np.flatnonzero(both[:, i])
            if entered.size == 0:
                continue
            t0 = int(entered[0])
            tail = self.regions[t0:, i]
            ok = ok and bool(np.all(tail == self.regions[t0, i]))
        return ok

    def entry_steps(self) -> np.ndarray:
        """First row index at which each agent sits in an absorbing cone, else -1."""
        both = (self.regions == ConeRegion.BOTH.value) | (
            self.regions == ConeRegion.BOTH_NEG.value
        )
        out = np.full(self.regions.shape[1], -1, dtype=np.int64)
        for i in range(self.regions.shape[1]):
            hits = np.flatnonzero(both[:, i])
            if hits.size:
                out[i] = hits[0]
        return out

    def signs_constant(self) -> bool:
        """Whether both inner-product sign series never change for any agent."""
        return bool(
            np.all(self.sign_first == self.sign_first[0])
            and np.all(self.sign_second == self.sign_second[0])
        )


def _vectors_match(schedule, config: DuelConfig) -> bool:
    def same(a, b):
        return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= 1e-9

    pair = (schedule.v, schedule.v_prime)
    return (same(pair[0], config.v) and same(pair[1], config.v_prime)) or (
        same(pair[0], config.v_prime) and same(pair[1], config.v)
    )


def duel_diagnostics(trajectory: Trajectory, config: DuelConfig) -> DuelDiagnostics:
    """Replay a duel trajectory and extract every per-step diagnostic series.

    The trajectory must have been produced under a RandomPair or
    AlternatingPair schedule over this config's vectors; snapshots may be
    strided, so the states are recomputed exactly from the recorded
    interventions.
    """
    sched = trajectory.schedule
    if not isinstance(sched, (RandomPairSchedule, AlternatingPairSchedule)):
        raise GuardError("duel diagnostics require a pair schedule")
    if not _vectors_match(sched, config):
        raise GuardError("trajectory schedule vectors do not match the duel config")
    opinions = as_unit_rows(trajectory.initial_opinions)
    applied = as_unit_rows(trajectory.applied_interventions) if len(
        trajectory.applied_interventions
    ) else trajectory.applied_interventions
    steps = applied.shape[0]
    n = opinions.shape[0]
    w_norms = np.empty((steps + 1, n))
    regions = np.empty((steps + 1, n), dtype=np.int8)
    sign_first = np.empty((steps + 1, n), dtype=np.int8)
    sign_second = np.empty((steps + 1, n), dtype=np.int8)
    disagreement = np.empty(steps + 1)
    sin_t = float(np.sin(config.theta))
    cos_t = float(np.cos(config.theta))
    e1, e2 = config.e1, config.e2
    iu = np.triu_indices(n, k=1) if n >= 2 else None
    eta = trajectory.eta

    c_both, c_neg = ConeRegion.BOTH.value, ConeRegion.BOTH_NEG.value
    c_first, c_second = ConeRegion.FIRST_ONLY.value, ConeRegion.SECOND_ONLY.value

    def record(row: int, pts: np.ndarray) -> None:
        p1 = pts @ e1
        p2 = pts @ e2
        # Residual norm, not sqrt(1 - p1^2 - p2^2): the subtraction form loses
        # all precision once the true out-of-plane norm falls below ~1e-8.
        resid = pts - p1[:, None] * e1 - p2[:, None] * e2
        w_norms[row] = np.sqrt(np.einsum("ij,ij->i", resid, resid))
        second = p2 / sin_t
        first = p1 - second * cos_t
        code = np.zeros(n, dtype=np.int8)
        interior = (np.abs(first) > _OBLIQUE_TOL) & (np.abs(second) > _OBLIQUE_TOL)
        pos1, pos2 = first > 0, second > 0
        code[interior & pos1 & pos2] = c_both
        code[interior & ~pos1 & ~pos2] = c_neg
        code[interior & pos1 & ~pos2] = c_first
        code[interior & ~pos1 & pos2] = c_second
        regions[row] = code
        sign_first[row] = np.sign(pts @ config.v)
        sign_second[row] = np.sign(pts @ config.v_prime)
        if iu is None:
            disagreement[row] = 0.0
        else:
            gram = pts @ pts.T
            worst = np.min(np.abs(gram[iu]))
            disagreement[row] = np.sqrt(max(0.0, 2.0 - 2.0 * worst))

    record(0, opinions)
    for k in range(steps):
        opinions = _intervene_rows(opinions, applied[k], eta)
        record(k + 1, opinions)
    return DuelDiagnostics(
        w_norms=w_norms,
        regions=regions,
        sign_first=sign_first,
        sign_second=sign_second,
        pair_disagreement=disagreement,
        config=config,
    )
