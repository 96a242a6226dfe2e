"""Application solvers built from the barrier calculus and path following.

* :func:`meb_solve` minimum enclosing ball on any manifold with a
  self-concordant squared distance (PD(n), hyperboloids)
* :func:`median_solve` geometric median on hyperboloids
* :func:`barycenter_solve` sum of squared distances on hyperboloids
* :func:`kempf_ness_solve` Kempf-Ness minimization over a geodesic ball

plus first-order baselines used as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .barriers import (
    Compatibility,
    alpha_from_compat,
    ball_barrier,
    kempf_ness_ball_barrier,
    lift_linear,
    median_barrier,
    meb_barrier,
)
from .exceptions import DegenerateInput, UnsupportedManifold
from .kernels import ZETA
from .functions import Combination, KempfNess, KempfNessSpec, distsq
from .manifolds import Hyperboloid, PDHermitian
from .newton import damped_newton
from .path import PathProblem, SolveTrace, main_stage


@dataclass
class MebProblem:
    manifold: object
    points: list
    epsilon: float = 1e-6
    adaptive: bool = False
    max_iter: int = 10_000_000
    damped_max_iter: int = 100_000
    S0: float | None = None  # override; must be >= the squared diameter


@dataclass
class MedianProblem:
    manifold: object
    points: list
    epsilon: float = 1e-6
    adaptive: bool = False
    max_iter: int = 10_000_000
    damped_max_iter: int = 100_000
    R0: float | None = None  # override; must be >= the diameter


@dataclass
class BarycenterProblem:
    manifold: object
    points: list
    epsilon: float = 1e-6
    adaptive: bool = False
    max_iter: int = 10_000_000
    damped_max_iter: int = 100_000


@dataclass
class ScalingProblem:
    spec: KempfNessSpec
    S0: float
    epsilon: float = 1e-6
    adaptive: bool = False
    max_iter: int = 10_000_000


@dataclass
class MebResult:
    center: object
    radius: float
    trace: SolveTrace


@dataclass
class MedianResult:
    median: object
    objective: float
    trace: SolveTrace


@dataclass
class BarycenterResult:
    point: object
    objective: float
    trace: SolveTrace


@dataclass
class ScalingResult:
    point: tuple
    value: float
    marginal_residual: float
    trace: SolveTrace


def pairwise_sq(manifold, points):
    m = len(points)
    d = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            d[i, j] = d[j, i] = manifold.dist(points[i], points[j]) ** 2
    return d


def _check_points(manifold, points, minimum):
    if len(points) < minimum:
        raise DegenerateInput(f"need at least {minimum} points, got {len(points)}")
    for q in points:
        manifold.check_point(q)


# ---------------------------------------------------------------------------
# Minimum enclosing ball
# ---------------------------------------------------------------------------


def meb_solve(prob):
    """Minimum enclosing ball; returns MebResult(center, radius, trace).

    Minimizes S over the barrier domain {d_i^2 < S < 2 S0}; the S-gap target
    eps R0 guarantees radius <= R* + eps because 2 R* >= R0.
    """
    M, pts = prob.manifold, list(prob.points)
    _check_points(M, pts, 3)
    d2 = pairwise_sq(M, pts)
    off = d2[~np.eye(len(pts), dtype=bool)]
    if np.any(off == 0.0):
        raise DegenerateInput("duplicate points")
    S0 = float(d2.max())
    if prob.S0 is not None:
        if prob.S0 < S0:
            raise DegenerateInput("S0 override is smaller than the squared diameter")
        S0 = float(prob.S0)
    R0 = math.sqrt(S0)
    B = meb_barrier(M, pts, S0)
    prod = B.manifold
    objective = lift_linear(prod, 1, [1.0])
    trace = SolveTrace()
    start, trace.damped_iters = damped_newton(B.function, 1.0, (pts[0], np.array([1.5 * S0])), 0.125,
                                                 max_iter=prob.damped_max_iter)
    pp = PathProblem(objective, B, alpha_from_compat(Compatibility(0.0, 0.0)), start,
                     prob.epsilon * R0, adaptive=prob.adaptive, max_iter=prob.max_iter)
    p, trace = main_stage(pp, trace)
    return MebResult(p[0], math.sqrt(float(p[1][0])), trace)


# ---------------------------------------------------------------------------
# Geometric median
# ---------------------------------------------------------------------------


def collinearity_gap(manifold, points):
    """Second singular value of the log-vectors at the first point (0 iff all on one geodesic)."""
    p1 = points[0]
    rows = np.array([manifold.to_coords(p1, manifold.log(p1, q)) for q in points[1:]])
    s = np.linalg.svd(rows, compute_uv=False)
    return float(s[1]) if len(s) > 1 else 0.0


def median_solve(prob):
    """Geometric median via the epigraph variables R_i >= d_i; returns MedianResult."""
    M, pts = prob.manifold, list(prob.points)
    if not isinstance(M, Hyperboloid):
        raise UnsupportedManifold("geometric median is only provided on hyperboloids")
    _check_points(M, pts, 3)
    R0 = math.sqrt(float(pairwise_sq(M, pts).max()))
    if prob.R0 is not None:
        if prob.R0 < R0:
            raise DegenerateInput("R0 override is smaller than the diameter")
        R0 = float(prob.R0)
    if R0 == 0.0 or collinearity_gap(M, pts) <= 1e-8 * R0:
        raise DegenerateInput("points lie on one geodesic")
    m = len(pts)
    B = median_barrier(M, pts, R0)
    objective = lift_linear(B.manifold, 1, np.ones(m))
    trace = SolveTrace()
    start, trace.damped_iters = damped_newton(B.function, 1.0, (pts[0], np.full(m, 1.5 * R0)), 0.125,
                                                 max_iter=prob.damped_max_iter)
    pp = PathProblem(objective, B, alpha_from_compat(Compatibility(0.0, 0.0)), start,
                     prob.epsilon, adaptive=prob.adaptive, max_iter=prob.max_iter)
    p, trace = main_stage(pp, trace)
    med = p[0]
    return MedianResult(med, sum_of_distances(M, pts, med), trace)


def sum_of_distances(manifold, points, p):
    return float(sum(manifold.dist(p, q) for q in points))


# ---------------------------------------------------------------------------
# Barycenter
# ---------------------------------------------------------------------------


def sum_of_squares(manifold, points, p):
    return float(sum(manifold.dist(p, q) ** 2 for q in points))


def barycenter_objective(manifold, points):
    return Combination([(1.0, distsq(manifold, q)) for q in points])


def barycenter_solve(prob):
    """Minimizer of sum_i d(p, p_i)^2 over the ball of radius R1 around p1.

    The barrier is 2[-log(R1^2 - d(p, p1)^2) + kappa d(p, p1)^2] whose analytic
    center is p1; the objective is (zeta/2, 1/2)-compatible with it.
    """
    M, pts = prob.manifold, list(prob.points)
    if not isinstance(M, Hyperboloid):
        raise UnsupportedManifold("barycenter path following is only provided on hyperboloids")
    _check_points(M, pts, 1)
    p1 = pts[0]
    R1 = max((M.dist(p1, q) for q in pts[1:]), default=0.0)
    trace = SolveTrace()
    if R1 == 0.0:
        trace.append(0, 0.0, 0.0, 0.0, 0.0)
        return BarycenterResult(p1, 0.0, trace)
    B = ball_barrier(M, p1, R1 * R1)
    f = barycenter_objective(M, pts)
    alpha = alpha_from_compat(Compatibility(ZETA / 2.0, 0.5))
    pp = PathProblem(f, B, alpha, p1, prob.epsilon, adaptive=prob.adaptive, max_iter=prob.max_iter)
    p, trace = main_stage(pp, trace)
    return BarycenterResult(p, sum_of_squares(M, pts, p), trace)


# ---------------------------------------------------------------------------
# Kempf-Ness scaling
# ---------------------------------------------------------------------------


def scaling_alpha(weight_norm):
    return alpha_from_compat(Compatibility(0.0, 2.0 * weight_norm))


def kempf_ness_solve(prob):
    """Minimize phi_v over {d(P, I)^2 < 2 S0}; returns ScalingResult."""
    spec = prob.spec
    f = KempfNess(spec)
    M = f.manifold
    B = kempf_ness_ball_barrier(M, prob.S0)
    start = tuple(np.eye(n, dtype=complex) for n in spec.dims)
    pp = PathProblem(f, B, scaling_alpha(spec.weight_norm), start, prob.epsilon,
                     adaptive=prob.adaptive, max_iter=prob.max_iter)
    p, trace = main_stage(pp)
    return ScalingResult(p, f.value(p), f.marginal_residual(p), trace)


def scaling_iteration_expression(S0, alpha, epsilon):
    """(9/5 + (36/5) sqrt((1 + S0)/alpha)) log(8 (1 + S0 + alpha) / (sqrt(alpha) eps))."""
    return ((9.0 / 5.0 + 36.0 / 5.0 * math.sqrt((1.0 + S0) / alpha))
            * math.log(8.0 * (1.0 + S0 + alpha) / (math.sqrt(alpha) * epsilon)))


# ---------------------------------------------------------------------------
# First-order baselines
# ---------------------------------------------------------------------------


def _riemannian_gradient(manifold, points, p, weights_fn):
    g = manifold.zero_tangent(p)
    for q in points:
        v = manifold.log(p, q)
        d = manifold.norm(p, v)
        w = weights_fn(d)
        if w != 0.0:
            g = manifold.add(g, v, -w)
    return g


def barycenter_gradient_descent(manifold, points, start=None, tol=1e-13, max_iter=100_000):
    """Gradient descent on sum d^2 with step 1/L, L = 2 m s coth(s), s = sqrt(kappa) R."""
    pts = list(points)
    p = pts[0] if start is None else start
    kappa = manifold.kappa if isinstance(manifold, Hyperboloid) else (
        0.5 if isinstance(manifold, PDHermitian) else 0.0)
    R = max(manifold.dist(p, q) for q in pts)
    s = math.sqrt(kappa) * 2.0 * R
    L = 2.0 * len(pts) * (s / math.tanh(s) if s > 0 else 1.0)
    for it in range(max_iter):
        g = _riemannian_gradient(manifold, pts, p, lambda d: 2.0)
        gn = manifold.norm(p, g)
        if gn <= tol:
            return p, it
        p = manifold.exp(p, manifold.scale(g, -1.0 / L))
    return p, max_iter


def _hyperboloid_distances(manifold, Q, p):
    """Distances from p to the rows of Q and the unit tangents at p pointing towards them."""
    sig = np.ones(Q.shape[1])
    sig[0] = -1.0
    diff = Q - p
    chord = np.sqrt(np.maximum((diff * diff) @ sig, 0.0))
    R = manifold.radius
    d = 2.0 * R * np.arcsinh(chord / (2.0 * R))
    v = diff + manifold.kappa * ((diff * p) @ sig)[:, None] * p
    nv = np.sqrt(np.maximum((v * v) @ sig, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(nv[:, None] > 0, v / nv[:, None], 0.0)
    return d, unit


def median_subgradient(manifold, points, start=None, steps=100_000, scale=None):
    """Subgradient descent on sum d with steps scale / sqrt(k + 1); returns (best point, best value)."""
    pts = list(points)
    p = pts[0] if start is None else start
    if scale is None:
        scale = math.sqrt(float(pairwise_sq(manifold, pts).max())) / len(pts)
    hyp = isinstance(manifold, Hyperboloid)
    Q = np.array(pts) if hyp else None

    def oracle(p):
        if hyp:
            d, unit = _hyperboloid_distances(manifold, Q, p)
            return float(d.sum()), -unit.sum(axis=0)
        g = manifold.zero_tangent(p)
        for q in pts:
            v = manifold.log(p, q)
            n = manifold.norm(p, v)
            if n > 0:
                g = manifold.add(g, v, -1.0 / n)
        return sum_of_distances(manifold, pts, p), g

    best, best_val = p, math.inf
    for k in range(steps + 1):
        val, g = oracle(p)
        if val < best_val:
            best, best_val = p, val
        gn = manifold.norm(p, g)
        if gn == 0.0 or k == steps:
            break
        p = manifold.exp(p, manifold.scale(g, -scale / (math.sqrt(k + 1.0) * gn)))
    return best, best_val


__all__ = [
    "MebProblem", "MedianProblem", "BarycenterProblem", "ScalingProblem", "meb_solve",
    "median_solve", "barycenter_solve", "kempf_ness_solve", "barycenter_gradient_descent",
    "median_subgradient", "collinearity_gap", "sum_of_distances", "sum_of_squares",
    "scaling_alpha", "scaling_iteration_expression", "pairwise_sq",
]
