"""Named verification suites.

A suite is a per-trial function ``trial(seed, k) -> float`` plus a threshold;
the suite passes when the largest trial value stays at or below the
threshold.  Trials draw from ``default_rng([seed, k])`` so any partition of
the trials across workers gives identical reports.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import numcheck as nc
from .barriers import (
    ball_barrier,
    hadamard_distsq_epigraph_barrier,
    hyp_rs_epigraph_barrier,
    kempf_ness_ball_barrier,
    level_set_barrier,
    lift_linear,
    median_barrier,
    meb_barrier,
    scale_sc,
)
from .functions import Combination, KempfNess, KempfNessSpec, distsq
from .manifolds import Euclidean, Hyperboloid, PDHermitian, curvature_pd, sectional_curvature_pd
from .newton import newton_state


@dataclass(frozen=True)
class Suite:
    name: str
    trial: object
    threshold: float
    description: str


# ---------------------------------------------------------------------------
# Random configurations
# ---------------------------------------------------------------------------


def _triple(m, rng, spread=1.0):
    p = m.random_point(rng, spread)
    return p, m.random_tangent(p, rng), m.random_tangent(p, rng)


def _hull_point(m, pts, rng):
    """A point on a geodesic segment between two data points (inside every data ball)."""
    i, j = rng.choice(len(pts), size=2, replace=False)
    return m.geodesic(pts[i], m.log(pts[i], pts[j]), rng.uniform(0.05, 0.95))


@lru_cache(maxsize=8)
def meb_instance(seed, n=2, m=5):
    M = PDHermitian(n)
    rng = np.random.default_rng([int(seed), 10**6])
    pts = [M.random_point(rng, 1.0) for _ in range(m)]
    S0 = max(M.dist(a, b) ** 2 for a in pts for b in pts)
    return M, pts, S0, meb_barrier(M, pts, S0)


@lru_cache(maxsize=8)
def median_instance(seed, n=2, m=4, kappa=1.0):
    M = Hyperboloid(n, kappa)
    rng = np.random.default_rng([int(seed), 10**6 + 1])
    pts = [M.random_point(rng, 1.0) for _ in range(m)]
    R0 = max(M.dist(a, b) for a in pts for b in pts)
    return M, pts, R0, median_barrier(M, pts, R0)


def meb_domain_point(seed, rng):
    M, pts, S0, B = meb_instance(seed)
    p = _hull_point(M, pts, rng)
    lo = max(M.dist(p, q) ** 2 for q in pts)
    return (p, np.array([rng.uniform(lo, 2.0 * S0)])), B


def median_domain_point(seed, rng):
    M, pts, R0, B = median_instance(seed)
    p = _hull_point(M, pts, rng)
    d = np.array([M.dist(p, q) for q in pts])
    return (p, rng.uniform(d, 2.0 * R0)), B


def rs_domain_point(rng, kappa=1.0, n=2):
    M = Hyperboloid(n, kappa)
    p0 = M.random_point(rng, 1.0)
    F = hyp_rs_epigraph_barrier(M, p0)
    p = M.random_point(rng, 1.0, base=p0)
    d2 = M.dist(p, p0) ** 2
    R = math.exp(rng.uniform(-2.0, 2.0))
    S = (d2 + math.exp(rng.uniform(-6.0, 2.0))) / R
    return F, (p, np.array([R, S])), d2


# ---------------------------------------------------------------------------
# Trial functions
# ---------------------------------------------------------------------------


def trial_sc_pd(seed, k, n=2):
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(n)
    f = distsq(M, M.random_point(rng, 1.5))
    p, u, w = _triple(M, rng, 1.5)
    return nc.sc_ratio(f, 2.0, p, w, u)


def trial_sc_hyp(seed, k, alpha=8.0, n=3, kappa=1.0, spread=2.0):
    rng = nc.trial_rng(seed, k)
    M = Hyperboloid(n, kappa)
    f = distsq(M, M.random_point(rng, spread))
    p, u, w = _triple(M, rng, spread)
    return nc.sc_ratio(f, alpha / kappa, p, w, u)


def _fd_error(f, p, u, w):
    d, h, t = nc.fd_derivatives(f, p, u, w)
    return max(nc.relative_error(d, f.diff(p, u)), nc.relative_error(h, f.hess(p, u, u)),
               nc.relative_error(t, f.third(p, w, u)))


def trial_fd_pd(seed, k, n=3):
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(n)
    f = distsq(M, M.random_point(rng))
    return _fd_error(f, *_triple(M, rng))


def trial_fd_hyp(seed, k, kappa=1.0, n=2):
    rng = nc.trial_rng(seed, k)
    M = Hyperboloid(n, kappa)
    f = distsq(M, M.random_point(rng))
    return _fd_error(f, *_triple(M, rng))


def trial_fd_kn(seed, k):
    rng = nc.trial_rng(seed, k)
    v = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    f = KempfNess(KempfNessSpec((2, 2), v))
    return _fd_error(f, *_triple(f.manifold, rng))


def trial_fd_barriers(seed, k):
    rng = nc.trial_rng(seed, k)
    which = k % 3
    if which == 0:
        p, B = meb_domain_point(seed, rng)
        F = B.function
    elif which == 1:
        p, B = median_domain_point(seed, rng)
        F = B.function
    else:
        F, p, _ = rs_domain_point(rng)
    m = F.manifold
    return _fd_error(F, p, m.random_tangent(p, rng, 0.1), m.random_tangent(p, rng, 0.1))


def trial_kernels(seed, k):
    return nc.kernel_identity_check(1, seed * 100_003 + k).max_value


def trial_curvature(seed, k):
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(3)
    p = M.random_point(rng)
    x, y = M.random_tangent(p, rng), M.random_tangent(p, rng)
    kxy = sectional_curvature_pd(M, p, x, y)
    return max(kxy, -0.5 - kxy)


def trial_bianchi(seed, k):
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(3)
    p = M.random_point(rng)
    x, y, z = (M.random_tangent(p, rng) for _ in range(3))
    s = curvature_pd(M, p, x, y, z) + curvature_pd(M, p, y, z, x) + curvature_pd(M, p, z, x, y)
    return float(np.max(np.abs(s))) / (1.0 + float(np.max(np.abs(curvature_pd(M, p, x, y, z)))))


def trial_ricci(seed, k):
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(2)
    f = distsq(M, M.random_point(rng))
    p = M.random_point(rng)
    return nc.ricci_asym_check(f, p, 1, seed * 100_003 + k).max_value


def trial_hessian_stability(seed, k, r=0.5):
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(3)
    f = distsq(M, M.random_point(rng))
    p = M.random_point(rng)
    u = M.random_tangent(p, rng)
    u = M.scale(u, r * math.sqrt(2.0 / f.hess(p, u, u)))
    return nc.hessian_stability_check(f, 2.0, p, u, 20, seed * 100_003 + k).max_value


def trial_dikin(seed, k):
    rng = nc.trial_rng(seed, k)
    p, B = meb_domain_point(seed, rng)
    return nc.dikin_check(B.function, p, 4, seed * 100_003 + k).max_value


def trial_barrier_gradient(seed, k):
    rng = nc.trial_rng(seed, k)
    p, B = meb_domain_point(seed, rng)
    return nc.barrier_gradient_check(B, p, 2, seed * 100_003 + k).max_value


def trial_decrement(seed, k):
    """|lambda_{d^2, 1}(p) - sqrt(2) d(p, p0)| on PD(3)."""
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(3)
    p0, p = M.random_point(rng), M.random_point(rng)
    return abs(newton_state(distsq(M, p0), 1.0, p).decrement - math.sqrt(2.0) * M.dist(p, p0))


def trial_rs_decrement(seed, k):
    """lambda_{F,1/2}^2 - (4 + 4 kappa d^2) for the RS barrier (<= 0 passes)."""
    rng = nc.trial_rng(seed, k)
    kappa = float(rng.choice([0.5, 1.0, 2.0]))
    F, p, d2 = rs_domain_point(rng, kappa)
    lam = newton_state(F, 0.5, p).decrement
    return lam * lam - (4.0 + 4.0 * kappa * d2)


def trial_sc_barriers(seed, k):
    """Self-concordance ratio of barriers and of t f + F families at their alpha."""
    rng = nc.trial_rng(seed, k)
    which = k % 6
    t = float([0.0, 1.0, 10.0, 100.0][(k // 6) % 4])
    if which == 0:
        p, B = meb_domain_point(seed, rng)
        F, alpha = B.function, 1.0
        f = lift_linear(F.manifold, 1, [1.0])
    elif which == 1:
        p, B = median_domain_point(seed, rng)
        F, alpha = B.function, 1.0
        f = lift_linear(F.manifold, 1, np.ones(len(p[1])))
    elif which == 2:
        F, p, _ = rs_domain_point(rng)
        f, alpha = None, 0.5
    elif which == 3:
        M = Hyperboloid(2, float(rng.choice([0.5, 1.0, 2.0])))
        c = M.random_point(rng)
        R = math.exp(rng.uniform(-1.0, 1.5))
        F = ball_barrier(M, c, R * R).function
        pts = [M.random_point(rng, R, base=c) for _ in range(3)]
        f = Combination([(1.0, distsq(M, q)) for q in pts])
        l = R * rng.uniform(0.0, 0.999)
        v = M.random_tangent(c, rng)
        p = M.exp(c, M.scale(v, l / M.norm(c, v)))
        alpha = 1.0
    elif which == 4:
        v = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        spec = KempfNessSpec((2, 2, 2), v, traceless=True)
        f = KempfNess(spec)
        S0 = float(np.exp(rng.uniform(-1.0, 2.5)))
        F = kempf_ness_ball_barrier(f.manifold, S0).function
        M = f.manifold
        ident = tuple(np.eye(2, dtype=complex) for _ in range(3))
        u = M.random_tangent(ident, rng)
        r = math.sqrt(2.0 * S0) * rng.uniform(0.0, 0.999)
        p = M.exp(ident, M.scale(u, r / M.norm(ident, u)))
        alpha = 11.0 / 36.0
    else:
        M = PDHermitian(2)
        p0 = M.random_point(rng)
        S = 2.0 * math.exp(rng.uniform(-1.0, 2.0))
        F = hadamard_distsq_epigraph_barrier(M, p0, 2.0)
        q = M.random_point(rng, 1.0, base=p0)
        d2 = M.dist(q, p0) ** 2
        p = (q, np.array([d2 + S]))
        f, alpha = None, 1.0
    G = F if f is None or t == 0.0 else Combination([(t, f), (1.0, F)])
    m = G.manifold
    u, w = m.random_tangent(p, rng), m.random_tangent(p, rng)
    return nc.sc_ratio(G, alpha, p, w, u)


def trial_level_set(seed, k):
    """sc ratio of -log(eta - d^2) on PD(2) at its alpha'."""
    rng = nc.trial_rng(seed, k)
    M = PDHermitian(2)
    p0 = M.random_point(rng)
    eta = math.exp(rng.uniform(-1.0, 2.0))
    F = level_set_barrier(distsq(M, p0), eta, 0.0)
    v = M.random_tangent(p0, rng)
    p = M.exp(p0, M.scale(v, math.sqrt(eta) * rng.uniform(0.0, 0.999) / M.norm(p0, v)))
    u, w = M.random_tangent(p, rng), M.random_tangent(p, rng)
    return nc.sc_ratio(F, F.alpha, p, w, u)


SUITES = {
    s.name: s
    for s in [
        Suite("sc-pd", trial_sc_pd, 1.0 + 1e-7, "distsq on PD(2) is 2-self-concordant"),
        Suite("sc-hyp", trial_sc_hyp, 1.0 + 1e-7, "distsq on hyperboloid(3,1) is 8-self-concordant"),
        Suite("sc-barriers", trial_sc_barriers, 1.0 + 1e-7, "barriers and t f + F families"),
        Suite("level-set", trial_level_set, 1.0 + 1e-7, "level-set barrier at alpha'"),
        Suite("fd-pd", trial_fd_pd, 1e-5, "distsq on PD(3) vs finite differences"),
        Suite("fd-hyp", trial_fd_hyp, 1e-5, "distsq on hyperboloid(2,1) vs finite differences"),
        Suite("fd-kn", trial_fd_kn, 1e-5, "Kempf-Ness on PD(2)^2 vs finite differences"),
        Suite("fd-barriers", trial_fd_barriers, 1e-5, "barrier composites vs finite differences"),
        Suite("kernels", trial_kernels, 1e-9, "H/T kernel identities"),
        Suite("curvature", trial_curvature, 1e-12, "sectional curvature of PD(3) in [-1/2, 0]"),
        Suite("bianchi", trial_bianchi, 1e-12, "first Bianchi identity on PD(3)"),
        Suite("ricci", trial_ricci, 1e-7, "third-derivative asymmetry vs curvature"),
        Suite("hessian-stability", trial_hessian_stability, 0.0, "Hessian stability at r = 1/2"),
        Suite("dikin", trial_dikin, 0.0, "unit Dikin ellipsoids of the MEB barrier are feasible"),
        Suite("barrier-gradient", trial_barrier_gradient, 0.0, "dF(u) <= theta * minkowski(u)"),
        Suite("decrement", trial_decrement, 1e-8, "lambda_{d^2,1} = sqrt(2) d on PD(3)"),
        Suite("rs-decrement", trial_rs_decrement, 1e-8, "RS barrier decrement bound"),
    ]
}


def _chunk_max(args):
    name, seed, ks = args
    trial = SUITES[name].trial
    return max((trial(seed, k) for k in ks), default=-math.inf)


def run_suite(name, seed=1, trials=100, jobs=1):
    """Run a named suite; returns a CheckReport."""
    if name not in SUITES:
        raise KeyError(name)
    suite = SUITES[name]
    if jobs <= 1:
        worst = _chunk_max((name, seed, range(trials)))
    else:
        chunks = [(name, seed, range(i, trials, jobs)) for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            worst = max(ex.map(_chunk_max, chunks))
    return nc.CheckReport(name, trials, float(worst), suite.threshold, seed)


__all__ = ["Suite", "SUITES", "run_suite", "meb_instance", "median_instance"]
