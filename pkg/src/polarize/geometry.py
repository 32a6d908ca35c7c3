"""Pure vector math on the unit sphere.

Everything here is a deterministic function of its inputs (random sampling
takes an explicit generator), so all operations are safe to call from any
number of threads.

The core update: an opinion ``u`` hit by an intervention ``v`` with strength
``eta`` moves to the unit vector proportional to

    w = u + eta * <u, v> * v

whose squared norm satisfies ``|w|^2 = 1 + (2*eta + eta^2) * <u, v>^2``.
Agreeing opinions (positive inner product) move towards ``v``, disagreeing
ones move towards ``-v``; ``v`` and ``-v`` have identical effect.
"""

from __future__ import annotations

import numpy as np

from .errors import GuardError

# Inputs whose norm deviates from 1 by more than this are rejected rather
# than silently renormalized; surfacing caller bugs beats hiding them.
UNIT_TOL = 1e-9


def check_eta(eta: float) -> float:
    """Validate the intervention-strength parameter (must be > 0)."""
    eta = float(eta)
    if not np.isfinite(eta) or eta <= 0.0:
        raise GuardError(f"eta must be a positive real, got {eta!r}")
    return eta


def as_unit_vector(u, dim: int | None = None) -> np.ndarray:
    """Validate ``u`` as a unit vector in R^d (d >= 2) and return it as float64.

    Raises GuardError if the dimension is wrong or the Euclidean norm is not
    1 within ``UNIT_TOL``.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1:
        raise GuardError(f"expected a 1-D vector, got shape {u.shape}")
    if u.shape[0] < 2:
        raise GuardError(f"dimension must be >= 2, got {u.shape[0]}")
    if dim is not None and u.shape[0] != dim:
        raise GuardError(f"dimension mismatch: expected {dim}, got {u.shape[0]}")
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > UNIT_TOL:
        raise GuardError(f"vector norm {norm!r} is not 1 within {UNIT_TOL}")
    return u


def as_unit_rows(points, dim: int | None = None) -> np.ndarray:
    """Validate a stack of unit vectors (one per row) and return it as float64."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2:
        raise GuardError(f"expected an (n, d) array of points, got shape {pts.shape}")
    if pts.shape[1] < 2:
        raise GuardError(f"dimension must be >= 2, got {pts.shape[1]}")
    if dim is not None and pts.shape[1] != dim:
        raise GuardError(f"dimension mismatch: expected {dim}, got {pts.shape[1]}")
    norms = np.linalg.norm(pts, axis=1)
    bad = np.abs(norms - 1.0) > UNIT_TOL
    if bad.any():
        i = int(np.argmax(bad))
        raise GuardError(
            f"row {i} has norm {norms[i]!r}, not 1 within {UNIT_TOL}"
        )
    return pts


def intervene(u, v, eta: float) -> np.ndarray:
    """Apply intervention ``v`` to opinion ``u``.

    Returns the renormalized update w/|w| with w = u + eta*<u,v>*v.  The
    output is renormalized unconditionally so repeated application cannot
    drift off the sphere.
    """
    u = as_unit_vector(u)
    v = as_unit_vector(v, dim=u.shape[0])
    eta = check_eta(eta)
    w = u + (eta * float(u @ v)) * v
    return w / np.linalg.norm(w)


def _intervene_rows(pts: np.ndarray, v: np.ndarray, eta: float) -> np.ndarray:
    """Update rule applied row-wise without validation (hot path)."""
    w = pts + (eta * (pts @ v))[:, None] * v[None, :]
    return w / np.sqrt(np.einsum("ij,ij->i", w, w))[:, None]


def intervene_many(opinions, v, eta: float) -> np.ndarray:
    """Apply one intervention to every row of an (n, d) opinion matrix."""
    pts = as_unit_rows(opinions)
    v = as_unit_vector(v, dim=pts.shape[1])
    eta = check_eta(eta)
    return _intervene_rows(pts, v, eta)


def angle(u, w) -> float:
    """Primary angle between two unit vectors, arccos of the clamped inner product."""
    u = as_unit_vector(u)
    w = as_unit_vector(w, dim=u.shape[0])
    return float(np.arccos(np.clip(u @ w, -1.0, 1.0)))


def pull(alpha, eta: float):
    """Post-intervention angle of an opinion at angle ``alpha`` from the intervention.

    For alpha in [0, pi/2],

        f(alpha) = arccos((1+eta)*cos(alpha) / sqrt(1 + (2*eta+eta^2)*cos^2(alpha)))

    f(alpha) <= alpha, f is strictly increasing, and alpha - f(alpha) is
    strictly increasing up to the critical angle (see ``critical_angle``).
    Accepts scalars or arrays.
    """
    eta = check_eta(eta)
    a = np.asarray(alpha, dtype=np.float64)
    if np.any(a < -1e-12) or np.any(a > np.pi / 2 + 1e-12):
        raise GuardError("alpha must lie in [0, pi/2]")
    c = np.cos(np.clip(a, 0.0, np.pi / 2))
    ratio = (1.0 + eta) * c / np.sqrt(1.0 + (2.0 * eta + eta * eta) * c * c)
    out = np.arccos(np.clip(ratio, -1.0, 1.0))
    return float(out) if np.isscalar(alpha) or np.asarray(alpha).ndim == 0 else out


def critical_angle(eta: float) -> float:
    """Angle arccos(sqrt(1/(2+eta))) where the pull alpha - f(alpha) peaks.

    Below it the update is a contraction towards the intervention direction.
    """
    eta = check_eta(eta)
    return float(np.arccos(np.sqrt(1.0 / (2.0 + eta))))


def orientation_sign_2d(u, w) -> int:
    """Sign of the 2-D cross product u x w: +1, -1, or 0.

    Only defined in dimension 2; interventions preserve this orientation.
    """
    u = as_unit_vector(u)
    w = as_unit_vector(w)
    if u.shape[0] != 2 or w.shape[0] != 2:
        raise GuardError("orientation_sign_2d requires dimension 2")
    cross = u[0] * w[1] - u[1] * w[0]
    if cross > 0.0:
        return 1
    if cross < 0.0:
        return -1
    return 0


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_uniform_sphere(d: int, rng, size: int | None = None) -> np.ndarray:
    """Uniform sample(s) on the unit sphere in R^d.

    Draws isotropic Gaussian vectors and normalizes them, which is exact in
    distribution in any dimension.  ``rng`` is a numpy Generator or a seed.
    Returns shape (d,) if ``size`` is None, else (size, d).
    """
    if int(d) < 2:
        raise GuardError(f"dimension must be >= 2, got {d}")
    d = int(d)
    gen = _as_generator(rng)
    n = 1 if size is None else int(size)
    out = gen.standard_normal((n, d))
    norms = np.linalg.norm(out, axis=1)
    # A zero draw has probability zero but would poison the division.
    while (redo := norms < 1e-12).any():
        out[redo] = gen.standard_normal((int(redo.sum()), d))
        norms = np.linalg.norm(out, axis=1)
    out /= norms[:, None]
    return out[0] if size is None else out
