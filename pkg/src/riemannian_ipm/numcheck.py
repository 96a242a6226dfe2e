"""Independent verification oracles.

Finite differences are taken along geodesics, and the third derivative is
the derivative of the transported Hessian form
``t -> Hess_{gamma(t)}(tau_t u, tau_t u)`` along ``gamma(t) = exp_p(t w)``.
Sampled checks return a :class:`CheckReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import H_matrix, T_tensor, kernel_H, kernel_T
from .manifolds import PDHermitian, curvature_pd, sectional_curvature_pd


@dataclass
class CheckReport:
    name: str
    samples: int
    max_value: float
    threshold: float
    seed: int | None = None

    @property
    def passed(self):
        return bool(self.max_value <= self.threshold)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag}  {self.name:<34s} samples={self.samples:<6d} "
                f"max={self.max_value:.6e} threshold={self.threshold:.3e} seed={self.seed}")


def trial_rng(seed, trial):
    """Per-trial generator, so results do not depend on how trials are batched."""
    return np.random.default_rng([int(seed), int(trial)])


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------


def _fd_third(f, p, w, u, h):
    m = f.manifold

    def form(t):
        q = m.geodesic(p, w, t)
        tu = m.transport(p, q, u)
        return f.hess(q, tu, tu)

    return (form(h) - form(-h)) / (2.0 * h)


def local_norm(f, p, u):
    """max(||u||_p, sqrt(Hess f(u, u))): the scale on which f varies along u.

    The analytic Hessian only sets the step length here, so a wrong Hessian
    cannot make the comparison agree.
    """
    m = f.manifold
    try:
        h = f.hess(p, u, u)
    except Exception:
        h = 0.0
    h = h if np.isfinite(h) else 0.0
    return max(m.norm(p, u), math.sqrt(max(h, 0.0)), 1e-300)


def fd_derivatives(f, p, u, w, step=1e-4):
    """Central-difference estimates of (df(u), Hess(u, u), third(w, u, u)).

    Steps are scaled by the local norms of ``u`` and ``w`` (see :func:`local_norm`).  The Hessian and
    the third derivative differentiate transported lower-order forms and use
    Richardson extrapolation over two step sizes.
    """
    m = f.manifold
    hu = step / local_norm(f, p, u)
    fp = f.value(m.geodesic(p, u, hu))
    fm = f.value(m.geodesic(p, u, -hu))
    diff_fd = (fp - fm) / (2.0 * hu)
    hess_fd = fd_hess_from_diff(f, p, u, u, step)
    # Richardson makes truncation O(h^4), so a 10x larger step trades nothing
    # for a 10x smaller roundoff term.
    hw = 10.0 * step / local_norm(f, p, w)
    d1 = _fd_third(f, p, w, u, hw)
    d2 = _fd_third(f, p, w, u, 2.0 * hw)
    third_fd = (4.0 * d1 - d2) / 3.0
    return diff_fd, hess_fd, third_fd


def fd_hess_from_diff(f, p, u, v, step=1e-4):
    """Hess(u, v) as the derivative of t -> df_{gamma(t)}(tau_t v) along exp_p(t u)."""
    m = f.manifold
    h = step / local_norm(f, p, u)

    def form(t):
        q = m.geodesic(p, u, t)
        return f.diff(q, m.transport(p, q, v))

    d1 = (form(h) - form(-h)) / (2.0 * h)
    d2 = (form(2 * h) - form(-2 * h)) / (4.0 * h)
    return (4.0 * d1 - d2) / 3.0


def relative_error(approx, exact):
    return abs(approx - exact) / (1.0 + abs(exact))


def fd_agreement(f, sampler, trials, seed, name="fd"):
    """Max relative fd error of diff, hess and third over sampled (p, u, w)."""
    worst = 0.0
    for k in range(trials):
        rng = trial_rng(seed, k)
        p, u, w = sampler(rng)
        d, h, t = fd_derivatives(f, p, u, w)
        worst = max(worst,
                    relative_error(d, f.diff(p, u)),
                    relative_error(h, f.hess(p, u, u)),
                    relative_error(t, f.third(p, w, u)))
    return CheckReport(name, trials, worst, 1e-5, seed)


# ---------------------------------------------------------------------------
# Sampled inequalities
# ---------------------------------------------------------------------------


def sc_ratio(f, alpha, p, w, u):
    """|third(w, u)| sqrt(alpha) / (2 sqrt(Hess(w, w)) Hess(u, u))."""
    hw = f.hess(p, w, w)
    hu = f.hess(p, u, u)
    return abs(f.third(p, w, u)) * math.sqrt(alpha) / (2.0 * math.sqrt(hw) * hu)


def sc_ratio_sampler(f, alpha, sampler, trials, seed, name="sc-ratio", threshold=1.0 + 1e-7):
    """Largest sampled self-concordance ratio; passes when it stays below 1."""
    worst = 0.0
    for k in range(trials):
        p, u, w = sampler(trial_rng(seed, k))
        worst = max(worst, sc_ratio(f, alpha, p, w, u))
    return CheckReport(name, trials, worst, threshold, seed)


def hyperbolic_tightness(l):
    """Ratio attained by the extremal configuration at distance ``l`` (curvature -1)."""
    if l == 0:
        return 0.0
    return (l / math.tanh(l) - 1.0) / (math.sqrt(2.0) * l)


def hyperbolic_tightness_config(manifold, l):
    """Explicit (f, p, w, u) realizing the extremal ratio on a hyperboloid of curvature -1.

    w is orthogonal to the geodesic direction and u makes an angle with
    tan^2 = tanh(l)/l with it, lying in the plane spanned by w and the geodesic.
    """
    from .functions import HyperboloidDistSq

    p0 = manifold.origin()
    p = manifold.from_spatial(np.r_[math.sinh(l), np.zeros(manifold.n - 1)])
    f = HyperboloidDistSq(manifold, p0)
    gam = -manifold.log(p, p0) / l
    basis = manifold.tangent_basis(p)
    perp = basis[1] - manifold.minkowski(basis[1], gam) * gam
    perp = perp / manifold.norm(p, perp)
    theta = math.atan(math.sqrt(math.tanh(l) / l))
    u = math.cos(theta) * gam + math.sin(theta) * perp
    return f, p, perp, u


def hessian_stability_check(f, alpha, p, u, directions, seed, name="hessian-stability"):
    """Checks (1-r)^2 Hess_p <= tau^* Hess_q <= (1-r)^-2 Hess_p for q = exp_p(u)."""
    m = f.manifold
    r = math.sqrt(f.hess(p, u, u) / alpha)
    q = m.exp(p, u)
    lo, hi = (1.0 - r) ** 2, (1.0 - r) ** -2
    worst = 0.0
    for k in range(directions):
        v = m.random_tangent(p, trial_rng(seed, k))
        a = f.hess(p, v, v)
        tv = m.transport(p, q, v)
        b = f.hess(q, tv, tv)
        ratio = b / a
        worst = max(worst, lo - ratio - 1e-8 * lo, ratio - hi - 1e-8 * hi)
    return CheckReport(name, directions, worst, 0.0, seed)


def dikin_check(F, p, trials, seed, alpha=1.0, radius=1.0, name="dikin"):
    """Samples u with ||u||_{F,p,alpha} < radius and reports infeasible exp_p(u) (0 is a pass)."""
    m = F.manifold
    bad = 0
    for k in range(trials):
        rng = trial_rng(seed, k)
        u = m.random_tangent(p, rng)
        nu = math.sqrt(F.hess(p, u, u) / alpha)
        s = radius * (rng.uniform(0.0, 1.0) if k % 2 else 0.999) / nu
        if not F.contains(m.exp(p, m.scale(u, s))):
            bad += 1
    return CheckReport(name, trials, float(bad), 0.0, seed)


def minkowski(contains, manifold, p, u, rtol=1e-10, cap=1e12):
    """inf{s > 0 : exp_p(u / s) in D} by bisection along the geodesic ray."""
    if manifold.norm(p, u) == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while contains(manifold.geodesic(p, u, hi)):
        lo, hi = hi, 2.0 * hi
        if hi > cap:
            return 0.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if contains(manifold.geodesic(p, u, mid)):
            lo = mid
        else:
            hi = mid
    return 1.0 / (0.5 * (lo + hi))


def barrier_gradient_check(barrier, p, trials, seed, name="barrier-gradient"):
    """Samples rays and reports max of dF_p(u) - theta * minkowski(u) (<= 0 is a pass)."""
    F = barrier.function
    m = F.manifold
    worst = -math.inf
    for k in range(trials):
        u = m.random_tangent(p, trial_rng(seed, k))
        pi = minkowski(F.contains, m, p, u)
        slack = 1e-7 * (1.0 + abs(F.diff(p, u)))
        worst = max(worst, F.diff(p, u) - barrier.theta * pi - slack)
    return CheckReport(name, trials, worst, 0.0, seed)


def enclosing_ellipsoid_check(barrier, center, points, name="enclosing-ellipsoid"):
    """Domain points q must satisfy ||log_center(q)||_{F,center} < 2 theta + 1."""
    F = barrier.function
    m = F.manifold
    worst = 0.0
    for q in points:
        u = m.log(center, q)
        worst = max(worst, math.sqrt(F.hess(center, u, u)) / (2.0 * barrier.theta + 1.0))
    return CheckReport(name, len(points), worst, 1.0)


def polarized_third(f, p, w, u, v):
    """Full trilinear third derivative from the (w, u, u) facet (symmetric in u, v only)."""
    m = f.manifold
    return 0.5 * (f.third(p, w, m.add(u, v)) - f.third(p, w, u) - f.third(p, w, v))


def ricci_asym_check(f, p, trials, seed, name="ricci-asymmetry"):
    """Checks third(X, Y, Z) - third(Y, X, Z) = -<R(X, Y)Z, grad f> on PD(n)."""
    m = f.manifold
    worst = 0.0
    for k in range(trials):
        rng = trial_rng(seed, k)
        x, y, z = (m.random_tangent(p, rng) for _ in range(3))
        lhs = polarized_third(f, p, x, y, z) - polarized_third(f, p, y, x, z)
        rhs = -m.inner(p, curvature_pd(m, p, x, y, z), f.gradient(p))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    return CheckReport(name, trials, worst, 1e-7, seed)


def curvature_bounds_check(manifold, trials, seed, spread=1.0, name="curvature-bounds"):
    """Sectional curvatures on PD(n) must lie in [-1/2, 0]."""
    worst = 0.0
    for k in range(trials):
        rng = trial_rng(seed, k)
        p = manifold.random_point(rng, spread)
        x, y = manifold.random_tangent(p, rng), manifold.random_tangent(p, rng)
        kxy = sectional_curvature_pd(manifold, p, x, y)
        worst = max(worst, kxy, -0.5 - kxy)
    return CheckReport(name, trials, worst, 1e-12, seed)


def bianchi_check(manifold, trials, seed, name="bianchi"):
    worst = 0.0
    for k in range(trials):
        rng = trial_rng(seed, k)
        p = manifold.random_point(rng)
        x, y, z = (manifold.random_tangent(p, rng) for _ in range(3))
        s = (curvature_pd(manifold, p, x, y, z) + curvature_pd(manifold, p, y, z, x)
             + curvature_pd(manifold, p, z, x, y))
        scale = 1.0 + np.max(np.abs(curvature_pd(manifold, p, x, y, z)))
        worst = max(worst, float(np.max(np.abs(s))) / scale)
    return CheckReport(name, trials, worst, 1e-12, seed)


def kernel_identity_check(trials, seed, name="kernel-identities"):
    """H(x,x)=2, T(x,x,x)=0, T symmetries and |T| <= sqrt2 sqrt(HHH) on random triples."""
    worst = 0.0
    for k in range(trials):
        rng = trial_rng(seed, k)
        x, y, z = np.exp(rng.uniform(-4.0, 4.0, size=3))
        c = math.exp(rng.uniform(-3.0, 3.0))
        t = kernel_T(x, y, z)
        bound = math.sqrt(2.0 * kernel_H(x, y) * kernel_H(y, z) * kernel_H(x, z))
        worst = max(worst,
                    abs(kernel_H(x, x) - 2.0),
                    abs(kernel_T(x, x, x)),
                    abs(kernel_T(y, x, z) - t) / (1.0 + abs(t)),
                    abs(kernel_T(c * x, c * y, c * z) - t) / (1.0 + abs(t)),
                    abs(kernel_T(1 / x, 1 / y, 1 / z) + t) / (1.0 + abs(t)),
                    max(abs(t) - bound, 0.0))
    return CheckReport(name, trials, worst, 1e-9, seed)


__all__ = [
    "CheckReport", "fd_derivatives", "fd_hess_from_diff", "fd_agreement", "sc_ratio",
    "sc_ratio_sampler", "hyperbolic_tightness", "hyperbolic_tightness_config",
    "hessian_stability_check", "dikin_check", "minkowski", "barrier_gradient_check",
    "enclosing_ellipsoid_check", "polarized_third", "ricci_asym_check",
    "curvature_bounds_check", "bianchi_check", "kernel_identity_check", "trial_rng",
    "H_matrix", "T_tensor", "PDHermitian",
]
