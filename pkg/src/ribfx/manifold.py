"""Lorentz-model hyperbolic geometry with analytic gradients.

Points on the hyperboloid of curvature -c (c > 0) are stored by their
space components only; the time component is derived on demand as

    time = sqrt(1/c + ||space||^2)

so the constraint  c * (||space||^2 - time^2) = -1  holds by construction.

Tangent vectors at the origin are lifted with the exponential map

    space = sinh(sqrt(c) ||u||) * u / (sqrt(c) ||u||)
    time  = cosh(sqrt(c) ||u||) / sqrt(c)

Geodesic distance, entailment-cone half aperture and exterior angle are
provided together with closed-form partial derivatives with respect to
the tangent inputs and log-curvature.  The derivative code is organised
as a fixed two-stage chain: per-pair partials with respect to each
point's (space, time), then a per-point pullback through the exponential
map (:func:`lift_points_vjp`).  There is no general autodiff here; the
graph is small and never changes shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# |kappa| is optimised in log-space and clamped to this range to keep the
# manifold away from degenerate (flat or needle-thin) regimes.
MIN_ABS_CURVATURE = 0.05
MAX_ABS_CURVATURE = 20.0

# Cone constant of the entailment half-aperture, arcsin(2K / (sqrt(c) ||space||)).
DEFAULT_CONE_K = 0.1

# Below this tangent norm sinh(z)/z switches to its series expansion.
_SINHC_SERIES_CUTOFF = 1e-6
# (z cosh z - sinh z)/z^3 cancels catastrophically for small z; switch earlier.
_Q_SERIES_CUTOFF = 1e-2


@dataclass(frozen=True)
class Curvature:
    """Learnable curvature kappa < 0, stored as log|kappa|."""

    log_abs: float

    @classmethod
    def from_abs(cls, c: float) -> "Curvature":
        if not (c > 0.0 and np.isfinite(c)):
            raise ValueError(f"|kappa| must be positive and finite, got {c}")
        return cls(float(np.log(c)))

    @property
    def abs(self) -> float:
        """c = |kappa| > 0."""
        return float(np.exp(self.log_abs))

    @property
    def kappa(self) -> float:
        return -self.abs

    def clamped(self) -> "Curvature":
        lo, hi = np.log(MIN_ABS_CURVATURE), np.log(MAX_ABS_CURVATURE)
        return Curvature(float(np.clip(self.log_abs, lo, hi)))


@dataclass(frozen=True)
class HyperbolicPoint:
    """A point on the hyperboloid: space components plus derived time."""

    space: np.ndarray
    time: float

    @classmethod
    def from_space(cls, space: np.ndarray, c: float) -> "HyperbolicPoint":
        space = np.asarray(space, dtype=np.float64)
        return cls(space, float(np.sqrt(1.0 / c + space @ space)))

    @classmethod
    def from_tangent(cls, u: np.ndarray, c: float) -> "HyperbolicPoint":
        return cls.from_space(exp_map0(u, c), c)

    def constraint_residual(self, c: float) -> float:
        """c * (||space||^2 - time^2) + 1; zero on the manifold."""
        return float(c * (self.space @ self.space - self.time**2) + 1.0)


def _sinhc(z: np.ndarray) -> np.ndarray:
    """sinh(z)/z, series-expanded near zero."""
    z = np.asarray(z, dtype=np.float64)
    small = z < _SINHC_SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + z * z / 6.0, np.sinh(safe) / safe)


def _q_coeff(z: np.ndarray) -> np.ndarray:
    """(z cosh z - sinh z) / z^3  ==  sinhc'(z)/z, series-expanded near zero."""
    z = np.asarray(z, dtype=np.float64)
    small = z < _Q_SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    series = 1.0 / 3.0 + z * z / 30.0 + z**4 / 840.0
    direct = (safe * np.cosh(safe) - np.sinh(safe)) / safe**3
    return np.where(small, series, direct)


def exp_map0(u: np.ndarray, c: float) -> np.ndarray:
    """Exponential map at the origin: tangent vector -> space components.

    Accepts a single vector (d,) or a batch (N, d).  The u = 0 singularity
    resolves to the origin (space 0, time 1/sqrt(c)).
    """
    u = np.asarray(u, dtype=np.float64)
    single = u.ndim == 1
    U = np.atleast_2d(u)
    r = np.linalg.norm(U, axis=1)
    z = np.sqrt(c) * r
    space = _sinhc(z)[:, None] * U
    return space[0] if single else space


def time_component(space: np.ndarray, c: float) -> np.ndarray | float:
    """Derived time coordinate sqrt(1/c + ||space||^2)."""
    space = np.asarray(space, dtype=np.float64)
    t = np.sqrt(1.0 / c + np.sum(space * space, axis=-1))
    return float(t) if t.ndim == 0 else t


def lorentz_inner(x_space: np.ndarray, y_space: np.ndarray, c: float) -> np.ndarray | float:
    """Lorentzian form <x, y> = x_space . y_space - x_time * y_time (row-wise)."""
    x_space = np.asarray(x_space, dtype=np.float64)
    y_space = np.asarray(y_space, dtype=np.float64)
    if x_space.shape[-1] != y_space.shape[-1]:
        raise ValueError(
            f"dimension mismatch: {x_space.shape[-1]} vs {y_space.shape[-1]}"
        )
    inner = np.sum(x_space * y_space, axis=-1) - time_component(x_space, c) * time_component(y_space, c)
    return float(inner) if np.ndim(inner) == 0 else inner


def pairwise_lorentz_inner(X: np.ndarray, Y: np.ndarray, c: float) -> np.ndarray:
    """All-pairs Lorentzian form between two sets of space components."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    tx = np.asarray(time_component(X, c))
    ty = np.asarray(time_component(Y, c))
    return X @ Y.T - np.outer(tx, ty)


def geodesic_distance(x_space: np.ndarray, y_space: np.ndarray, c: float) -> np.ndarray | float:
    """Row-wise geodesic distance arccosh(clamp(-c <x,y>, >=1)) / sqrt(c)."""
    m = np.maximum(-c * np.asarray(lorentz_inner(x_space, y_space, c)), 1.0)
    d = np.arccosh(m) / np.sqrt(c)
    return float(d) if np.ndim(d) == 0 else d


def pairwise_geodesic_distance(X: np.ndarray, Y: np.ndarray, c: float) -> np.ndarray:
    m = np.maximum(-c * pairwise_lorentz_inner(X, Y, c), 1.0)
    return np.arccosh(m) / np.sqrt(c)


def half_aperture(x_space: np.ndarray, c: float, cone_k: float = DEFAULT_CONE_K) -> np.ndarray | float:
    """Entailment-cone half aperture arcsin(clamp(2K / (sqrt(c) ||space||), <=1)).

    Undefined at the origin: a zero space norm raises.
    """
    x_space = np.asarray(x_space, dtype=np.float64)
    n = np.linalg.norm(x_space, axis=-1)
    if np.any(n == 0.0):
        raise ValueError("half_aperture undefined at the origin (zero space norm)")
    q = np.minimum(2.0 * cone_k / (np.sqrt(c) * n), 1.0)
    a = np.arcsin(q)
    return float(a) if np.ndim(a) == 0 else a


def exterior_angle(parent_space: np.ndarray, child_space: np.ndarray, c: float) -> np.ndarray | float:
    """Angle at the parent between the outward radial ray and the child geodesic.

    arccos((t_child + t_parent * c * <p,ch>) / (||space_p|| * sqrt((c <p,ch>)^2 - 1))),
    arguments clamped to [-1, 1].  Coincident points (vanishing denominator) raise.
    """
    parent_space = np.asarray(parent_space, dtype=np.float64)
    child_space = np.asarray(child_space, dtype=np.float64)
    inner = np.asarray(lorentz_inner(parent_space, child_space, c), dtype=np.float64)
    tp = np.asarray(time_component(parent_space, c))
    tc = np.asarray(time_component(child_space, c))
    n = np.linalg.norm(parent_space, axis=-1)
    w = c * inner
    denom_sq = np.maximum(w * w - 1.0, 0.0)
    denom = n * np.sqrt(denom_sq)
    if np.any(denom < 1e-12):
        raise ValueError("exterior_angle undefined: coincident points or origin parent")
    h = np.clip((tc + tp * w) / denom, -1.0, 1.0)
    e = np.arccos(h)
    return float(e) if np.ndim(e) == 0 else e


# ---------------------------------------------------------------------------
# Lifted-point caches and pullbacks (the gradient chain for the losses)
# ---------------------------------------------------------------------------


@dataclass
class LiftedPoints:
    """Per-point quantities cached by :func:`lift_points` for reuse in pullbacks."""

    u: np.ndarray      # (N, d) tangent vectors
    r: np.ndarray      # (N,)  ||u||
    z: np.ndarray      # (N,)  sqrt(c) ||u||
    g: np.ndarray      # (N,)  sinh(z)/z
    q: np.ndarray      # (N,)  (z cosh z - sinh z)/z^3
    space: np.ndarray  # (N, d)
    time: np.ndarray   # (N,)
    snorm: np.ndarray  # (N,)  ||space|| = sinh(z)/sqrt(c)


def lift_points(U: np.ndarray, c: float) -> LiftedPoints:
    """Lift a batch of tangent vectors, caching what the pullback needs."""
    U = np.asarray(U, dtype=np.float64)
    r = np.linalg.norm(U, axis=1)
    z = np.sqrt(c) * r
    g = _sinhc(z)
    q = _q_coeff(z)
    space = g[:, None] * U
    time = np.cosh(z) / np.sqrt(c)
    snorm = np.sinh(z) / np.sqrt(c)
    return LiftedPoints(U, r, z, g, q, space, time, snorm)


def lift_points_vjp(
    pts: LiftedPoints, c: float, g_space: np.ndarray, g_time: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Pull (d L/d space, d L/d time) back to (d L/d u, per-point d L/d c).

    Uses   space = sinhc(z) u,   time = cosh(z)/sqrt(c),   z = sqrt(c) ||u||:

        dL/du = sinhc(z) g_space
              + c q(z) (g_space . u) u
              + sqrt(c) sinhc(z) g_time u
        dL/dc = (g_space . u) sinhc'(z) z / (2c)
              + g_time (r sinh z - cosh(z)/sqrt(c)) / (2c)
    """
    sqrt_c = np.sqrt(c)
    dot_su = np.sum(g_space * pts.u, axis=1)
    coeff = c * pts.q * dot_su + sqrt_c * pts.g * np.asarray(g_time)
    g_u = pts.g[:, None] * g_space + coeff[:, None] * pts.u
    # sinhc'(z) = q(z) * z, so the space term is dot_su * q * z^2 / (2c).
    g_c = dot_su * pts.q * pts.z**2 / (2.0 * c) + np.asarray(g_time) * (
        pts.r * np.sinh(pts.z) - np.cosh(pts.z) / sqrt_c
    ) / (2.0 * c)
    return g_u, g_c


def pairwise_distance_forward(
    pi: LiftedPoints, pj: LiftedPoints, c: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All-pairs distance between lifted batches; returns (D, inner, m)."""
    inner = pi.space @ pj.space.T - np.outer(pi.time, pj.time)
    m = np.maximum(-c * inner, 1.0)
    D = np.arccosh(m) / np.sqrt(c)
    return D, inner, m


def pairwise_distance_backward(
    pi: LiftedPoints,
    pj: LiftedPoints,
    c: float,
    inner: np.ndarray,
    m: np.ndarray,
    D: np.ndarray,
    g_D: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    """Pull dL/dD back to per-point (g_space, g_time) pairs and the direct dL/dc.

    Cells clamped at m = 1 (coincident points) propagate zero gradient.
    Returns (g_space_i, g_time_i, g_space_j, g_time_j, g_c_direct); the
    caller still owes the per-point curvature terms via lift_points_vjp.
    """
    active = m > 1.0
    root = np.sqrt(np.maximum(m * m - 1.0, 0.0))
    g_m = np.where(active, g_D / (np.sqrt(c) * np.where(active, root, 1.0)), 0.0)
    g_inner = -c * g_m
    g_space_i = g_inner @ pj.space
    g_time_i = -(g_inner @ pj.time)
    g_space_j = g_inner.T @ pi.space
    g_time_j = -(g_inner.T @ pi.time)
    # d/dc holding the points fixed: m = -c*inner and the 1/sqrt(c) prefactor.
    g_c = float(np.sum(g_m * (-inner)) - np.sum(g_D * D) / (2.0 * c))
    return g_space_i, g_time_i, g_space_j, g_time_j, g_c


def cone_terms_forward(
    parent: LiftedPoints, child: LiftedPoints, c: float, cone_k: float = DEFAULT_CONE_K
) -> dict:
    """Exterior angle and half aperture for matched (parent_i, child_i) rows.

    Returns the intermediate quantities needed by :func:`cone_terms_backward`.
    Degenerate rows (parent at the origin or coincident pair) clamp instead of
    raising: aperture pi/2, angle 0 or pi, with zero gradient.
    """
    inner = np.sum(parent.space * child.space, axis=1) - parent.time * child.time
    w = c * inner
    wq = np.maximum(w * w - 1.0, 0.0)
    denom = parent.snorm * np.sqrt(wq)
    degenerate = denom < 1e-12
    A = child.time + parent.time * w
    h_raw = np.where(degenerate, 1.0, A / np.where(degenerate, 1.0, denom))
    h = np.clip(h_raw, -1.0, 1.0)
    angle = np.arccos(h)
    q_raw = 2.0 * cone_k / (np.sqrt(c) * np.maximum(parent.snorm, 1e-300))
    q = np.minimum(q_raw, 1.0)
    aperture = np.arcsin(q)
    return {
        "inner": inner, "w": w, "wq": wq, "denom": denom, "A": A,
        "h_raw": h_raw, "h": h, "angle": angle, "q_raw": q_raw, "q": q,
        "aperture": aperture, "degenerate": degenerate,
    }


def cone_terms_backward(
    parent: LiftedPoints,
    child: LiftedPoints,
    c: float,
    fwd: dict,
    g_angle: np.ndarray,
    g_aperture: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    """Pull (dL/d angle, dL/d aperture) back to point-space gradients and dL/dc."""
    w, wq, denom, A, h = fwd["w"], fwd["wq"], fwd["denom"], fwd["A"], fwd["h"]
    inner, q = fwd["inner"], fwd["q"]
    ok = (~fwd["degenerate"]) & (np.abs(fwd["h_raw"]) < 1.0)

    # arccos branch: E = arccos(A/B) with B = snorm_p * sqrt(w^2 - 1).
    g_h = np.where(ok, -g_angle / np.sqrt(np.maximum(1.0 - h * h, 1e-300)), 0.0)
    g_A = g_h / np.where(ok, denom, 1.0)
    g_B = -g_h * A / np.where(ok, denom * denom, 1.0)
    root_wq = np.sqrt(np.maximum(wq, 1e-300))
    g_w = g_A * parent.time + g_B * parent.snorm * w / root_wq
    g_n_parent = g_B * root_wq
    g_time_child = g_A.copy()
    g_time_parent = g_A * w
    g_inner = g_w * c
    g_c = float(np.sum(g_w * inner))

    # arcsin branch: aperture = arcsin(2K / (sqrt(c) snorm)), clamped at 1.
    ap_ok = fwd["q_raw"] < 1.0
    g_q = np.where(ap_ok, g_aperture / np.sqrt(np.maximum(1.0 - q * q, 1e-300)), 0.0)
    g_n_parent = g_n_parent + g_q * (-q / np.maximum(parent.snorm, 1e-300))
    g_c += float(np.sum(g_q * (-q / (2.0 * c))))

    # Route the Lorentz form and ||space_parent|| into per-point (space, time).
    g_space_parent = g_inner[:, None] * child.space + (
        g_n_parent / np.maximum(parent.snorm, 1e-300)
    )[:, None] * parent.space
    g_time_parent = g_time_parent + g_inner * (-child.time)
    g_space_child = g_inner[:, None] * parent.space
    g_time_child = g_time_child + g_inner * (-parent.time)
    return g_space_parent, g_time_parent, g_space_child, g_time_child, g_c


# ---------------------------------------------------------------------------
# Scalar tangent-level gradient surfaces (what the finite-difference suite hits)
# ---------------------------------------------------------------------------


def distance_from_tangents(u: np.ndarray, w: np.ndarray, c: float) -> float:
    """d(exp_map0(u), exp_map0(w)) as a plain function of the tangents."""
    D, _, _ = pairwise_distance_forward(
        lift_points(np.atleast_2d(u), c), lift_points(np.atleast_2d(w), c), c
    )
    return float(D[0, 0])


def distance_from_tangents_grad(
    u: np.ndarray, w: np.ndarray, c: float
) -> tuple[float, np.ndarray, np.ndarray, float]:
    """Distance plus analytic (d/du, d/dw, d/d log c)."""
    pi = lift_points(np.atleast_2d(u), c)
    pj = lift_points(np.atleast_2d(w), c)
    D, inner, m = pairwise_distance_forward(pi, pj, c)
    gsi, gti, gsj, gtj, g_c = pairwise_distance_backward(
        pi, pj, c, inner, m, D, np.ones_like(D)
    )
    g_u, g_ci = lift_points_vjp(pi, c, gsi, gti)
    g_w, g_cj = lift_points_vjp(pj, c, gsj, gtj)
    g_logc = c * (g_c + float(np.sum(g_ci) + np.sum(g_cj)))
    return float(D[0, 0]), g_u[0], g_w[0], g_logc


def half_aperture_from_tangent_grad(
    u: np.ndarray, c: float, cone_k: float = DEFAULT_CONE_K
) -> tuple[float, np.ndarray, float]:
    """Half aperture of exp_map0(u) plus analytic (d/du, d/d log c)."""
    parent = lift_points(np.atleast_2d(u), c)
    child = parent  # unused by the aperture branch
    fwd = cone_terms_forward(parent, child, c, cone_k)
    gsp, gtp, _, _, g_c = cone_terms_backward(
        parent, child, c, fwd, np.zeros(1), np.ones(1)
    )
    g_u, g_cp = lift_points_vjp(parent, c, gsp, gtp)
    return float(fwd["aperture"][0]), g_u[0], c * (g_c + float(np.sum(g_cp)))


def exterior_angle_from_tangents_grad(
    u: np.ndarray, w: np.ndarray, c: float
) -> tuple[float, np.ndarray, np.ndarray, float]:
    """Exterior angle at exp_map0(u) toward exp_map0(w), with gradients."""
    parent = lift_points(np.atleast_2d(u), c)
    child = lift_points(np.atleast_2d(w), c)
    fwd = cone_terms_forward(parent, child, c)
    gsp, gtp, gsc, gtc, g_c = cone_terms_backward(
        parent, child, c, fwd, np.ones(1), np.zeros(1)
    )
    g_u, g_cp = lift_points_vjp(parent, c, gsp, gtp)
    g_w, g_cc = lift_points_vjp(child, c, gsc, gtc)
    g_logc = c * (g_c + float(np.sum(g_cp) + np.sum(g_cc)))
    return float(fwd["angle"][0]), g_u[0], g_w[0], g_logc
