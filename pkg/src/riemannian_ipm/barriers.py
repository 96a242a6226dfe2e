"""Barrier combinators with bookkeeping of the (alpha, theta) constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, UnsupportedManifold
from .functions import Combination, Lift, NegLog, Quadratic, ScFunction, distsq
from .manifolds import Euclidean, Hyperboloid, Product


@dataclass(frozen=True)
class Compatibility:
    beta1: float
    beta2: float

    def __post_init__(self):
        if self.beta1 < 0 or self.beta2 < 0:
            raise ValueError("compatibility constants must be nonnegative")


@dataclass(frozen=True, eq=False)
class Barrier:
    """A strongly self-concordant barrier together with its parameter theta."""

    function: ScFunction
    theta: float

    def __post_init__(self):
        if not self.theta >= 0:
            raise ValueError("theta must be nonnegative")
        if not (self.alpha and self.alpha > 0):
            raise ValueError("barrier function must carry a positive alpha")

    @property
    def alpha(self):
        return self.function.alpha

    @property
    def manifold(self):
        return self.function.manifold

    def contains(self, p):
        return self.function.contains(p)

    def __add__(self, other):
        return Barrier(sum_sc(self.function, other.function), self.theta + other.theta)


def scale_sc(f, c):
    """c f, which is (c alpha)-self-concordant."""
    if not c > 0:
        raise ValueError("scale must be positive")
    if c == 1:
        return f
    alpha = None if f.alpha is None else c * f.alpha
    return Combination([(c, f)], alpha=alpha)


def sum_sc(f1, f2):
    """f1 + f2 on the intersected domains, alpha = min(alpha1, alpha2)."""
    alphas = [a for a in (f1.alpha, f2.alpha) if a is not None]
    alpha = min(alphas) if len(alphas) == 2 else None
    return Combination([(1.0, f1), (1.0, f2)], alpha=alpha)


def alpha_from_compat(c):
    """Self-concordance constant of t f + F for all t >= 0 when f is c-compatible with F."""
    b1, b2 = c.beta1, c.beta2
    if b2 * b2 > 2.0 * max(b1 * (b1 - 1.0), 1.0 - b1):
        return 4.0 * (b2 * b2 - (b1 - 1.0) ** 2) / (b2 * b2 * (b2 * b2 + 4.0 * b1))
    return 1.0 / max(b1 * b1, 1.0)


def epigraph_alpha(c):
    b1, b2 = c.beta1, c.beta2
    return 1.0 / max(1.0 + b1 * b1, b1 + b2 * b2 / 2.0, 2.0 * b2 * b2 / 3.0)


def level_set_alpha(gap, alpha):
    """alpha' for -log(eta - f) given gap = eta - (lower bound on inf f)."""
    if gap < 0:
        raise ValueError("eta must exceed the lower bound on inf f")
    x = gap / alpha
    return (4.0 * x + 1.0) / (2.0 * x + 1.0) ** 2


class Guarded(Combination):
    """A function with an extra domain predicate."""

    def __init__(self, f, predicate, alpha=None):
        super().__init__([(1.0, f)], alpha=f.alpha if alpha is None else alpha)
        self.predicate = predicate

    def contains(self, p):
        try:
            return bool(self.predicate(p)) and super().contains(p)
        except DomainError:
            return False


def lift_linear(product, index, b, c=0.0):
    """p -> <b, p[index]> + c for a Euclidean factor of a product."""
    factor = product.factors[index]
    if not isinstance(factor, Euclidean):
        raise UnsupportedManifold("linear lifts need a Euclidean factor")
    return Lift(Quadratic.linear(factor, b, c), product, index, alpha=math.inf)


def lift_quadratic(product, index, A, b=None, c=0.0):
    factor = product.factors[index]
    b = np.zeros(factor.n) if b is None else b
    return Lift(Quadratic(factor, A, b, c), product, index, alpha=math.inf)


def _unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def epigraph_barrier(f, F, c):
    """G(p, t) = -log(t - f(p)) + F(p) on the epigraph of f.

    Points are pairs (p, t) with t a length-1 array.
    """
    prod = Product((f.manifold, Euclidean(1)))
    t = lift_linear(prod, 1, [1.0])
    omega = Combination([(1.0, t), (-1.0, Lift(f, prod, 0))])
    return Combination([(1.0, NegLog(omega)), (1.0, Lift(F, prod, 0))], alpha=epigraph_alpha(c))


def level_set_barrier(f, eta, fstar_lb):
    """-log(eta - f) on {f < eta}, with alpha' computed from eta - fstar_lb."""
    omega = Combination([(-1.0, f)], const=float(eta))
    return NegLog(omega, alpha=level_set_alpha(eta - fstar_lb, f.alpha))


def hadamard_distsq_epigraph_barrier(manifold, p0, alpha):
    """-log(S - d(p, p0)^2) + d(p, p0)^2 / alpha on {(p, S) : d^2 < S}."""
    d2 = distsq(manifold, p0)
    G = epigraph_barrier(d2, scale_sc(d2, 1.0 / alpha), Compatibility(0.0, 1.0))
    return G


def hyp_rs_epigraph_barrier(manifold, p0):
    """-log(R S - d(p, p0)^2) + kappa d(p, p0)^2 on {(p, (R, S)) : R S > d^2, R, S > 0}."""
    if not isinstance(manifold, Hyperboloid):
        raise UnsupportedManifold("the RS-epigraph barrier is only available on hyperboloids")
    prod = Product((manifold, Euclidean(2)))
    d2 = Lift(distsq(manifold, p0), prod, 0)
    rs = lift_quadratic(prod, 1, np.array([[0.0, 0.5], [0.5, 0.0]]))
    omega = Combination([(1.0, rs), (-1.0, d2)])
    F = Combination([(1.0, NegLog(omega)), (manifold.kappa, d2)])
    return Guarded(F, lambda p: p[1][0] > 0 and p[1][1] > 0, alpha=0.5)


def meb_barrier(manifold, points, S0, alpha=None):
    """-log(2 S0 - S) + sum_i [-log(S - d_i^2) + d_i^2 / alpha] with theta = 1 + m (1 + 2 S0 * 2/alpha)."""
    prod = Product((manifold, Euclidean(1)))
    if alpha is None:
        alpha = distsq(manifold, points[0]).alpha
    terms = [(1.0, NegLog(lift_linear(prod, 1, [-1.0], 2.0 * S0)))]
    for q in points:
        d2 = Lift(distsq(manifold, q), prod, 0)
        s = lift_linear(prod, 1, [1.0])
        terms.append((1.0, NegLog(Combination([(1.0, s), (-1.0, d2)]))))
        terms.append((1.0 / alpha, d2))
    theta = 1.0 + len(points) * (1.0 + 4.0 * S0 / alpha)
    return Barrier(Combination(terms, alpha=1.0), theta)


def median_barrier(manifold, points, R0):
    """sum_i [-log(2 R0 - R_i) - 2 log(R_i^2 - d_i^2) + 2 kappa d_i^2], theta = 5m + 16 m kappa R0^2."""
    if not isinstance(manifold, Hyperboloid):
        raise UnsupportedManifold("the median barrier is only available on hyperboloids")
    m = len(points)
    prod = Product((manifold, Euclidean(m)))
    kappa = manifold.kappa
    terms = []
    for i, q in enumerate(points):
        e = _unit(m, i)
        d2 = Lift(distsq(manifold, q), prod, 0)
        r2 = lift_quadratic(prod, 1, np.outer(e, e))
        terms.append((1.0, NegLog(lift_linear(prod, 1, -e, 2.0 * R0))))
        terms.append((2.0, NegLog(Combination([(1.0, r2), (-1.0, d2)]))))
        terms.append((2.0 * kappa, d2))
    F = Guarded(Combination(terms), lambda p: bool(np.all(p[1] > 0)), alpha=1.0)
    return Barrier(F, 5.0 * m + 16.0 * m * kappa * R0 * R0)


def ball_barrier(manifold, center, radius_sq):
    """-2 log(R^2 - d(p, c)^2) + 2 kappa d(p, c)^2 on a hyperbolic ball; analytic center c."""
    if not isinstance(manifold, Hyperboloid):
        raise UnsupportedManifold("the ball barrier is only available on hyperboloids")
    d2 = distsq(manifold, center)
    omega = Combination([(-1.0, d2)], const=float(radius_sq))
    F = Combination([(2.0, NegLog(omega)), (2.0 * manifold.kappa, d2)], alpha=1.0)
    return Barrier(F, 4.0 + 4.0 * manifold.kappa * radius_sq)


def kempf_ness_ball_barrier(manifold, S0):
    """-log(S0 - h) + h with h = d(p, I)^2 / 2 on a product of PD factors; theta = 1 + S0."""
    ident = tuple(np.eye(f.n, dtype=complex) for f in manifold.factors)
    h = scale_sc(distsq(manifold, ident), 0.5)
    omega = Combination([(-1.0, h)], const=float(S0))
    F = Combination([(1.0, NegLog(omega)), (1.0, h)], alpha=1.0)
    return Barrier(F, 1.0 + S0)


__all__ = [
    "Barrier", "Compatibility", "scale_sc", "sum_sc", "alpha_from_compat", "epigraph_alpha",
    "level_set_alpha", "epigraph_barrier", "level_set_barrier", "hadamard_distsq_epigraph_barrier",
    "hyp_rs_epigraph_barrier", "meb_barrier", "median_barrier", "ball_barrier",
    "kempf_ness_ball_barrier", "lift_linear", "lift_quadratic", "Guarded",
]
