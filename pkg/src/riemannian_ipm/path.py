"""Short-step path following for min f over the domain of a barrier F.

One Newton iterate of F_t = t f + F is taken per time step; time grows by the
fixed factor exp((l1 - l2) / (l1 + sqrt(theta / alpha))).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .exceptions import AssertionBreach, MaxIterations, PreconditionViolated
from .newton import cholesky_pd, newton_from_jet, newton_iterate, rho

TRACE_HEADER = ("ell", "t", "lambda", "objective", "gap_bound")


@dataclass
class PathProblem:
    objective: object
    barrier: object
    alpha: float
    start: object
    epsilon: float
    lambda1: float = 0.25
    lambda2: float = 1.0 / 9.0
    max_iter: int = 10_000_000
    adaptive: bool = False

    def __post_init__(self):
        l1, l2 = self.lambda1, self.lambda2
        if not (0 < l2 < l1 < 1 and (l1 / (1 - l1)) ** 2 <= l2 < 1.0 / 3.0):
            raise ValueError("need (l1/(1-l1))^2 <= l2 < 1/3 and l2 < l1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def theta(self):
        return self.barrier.theta

    @property
    def rate(self):
        """Exponent k of the per-step time factor exp(k)."""
        return (self.lambda1 - self.lambda2) / (self.lambda1 + math.sqrt(self.theta / self.alpha))

    def iteration_bound(self, t0):
        """Newton steps needed by the fixed schedule to reach 2(theta + alpha)/t <= eps."""
        x = math.log(2.0 * (self.theta + self.alpha) / (t0 * self.epsilon))
        return max(math.ceil(x / self.rate), 0) + 1


@dataclass
class SolveTrace:
    rows: list = field(default_factory=list)
    damped_iters: int = 0
    path_iters: int = 0
    t0: float = math.nan

    def append(self, ell, t, lam, objective, gap_bound):
        self.rows.append((int(ell), float(t), float(lam), float(objective), float(gap_bound)))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in self.rows:
            w.writerow([r[0]] + [repr(x) for x in r[1:]])
        return buf.getvalue()

    @property
    def final_gap(self):
        return self.rows[-1][4] if self.rows else math.inf

    def column(self, name):
        i = TRACE_HEADER.index(name)
        return np.array([r[i] for r in self.rows])


def _dual_norm(c, g):
    y = linalg.solve_triangular(c, g, lower=True)
    return float(np.sqrt(y @ y))


def barrier_decrement_and_dual_norm(problem, p):
    """(lambda_F(p), ||df_p||^*_{F,p}) with alpha = 1 for F."""
    _, gF, hF = problem.barrier.function.jet(p)
    _, gf, _ = problem.objective.jet(p)
    d = np.diag(hF)
    s = 1.0 / np.sqrt(d)
    c = cholesky_pd(hF * s[:, None] * s[None, :])
    return _dual_norm(c, s * gF), _dual_norm(c, s * gf)


def t0_init(problem):
    """(sqrt(alpha) l1 - lambda_F(p)) / ||df_p||^*_{F,p}; 0 when df_p = 0."""
    lam_F, dn = barrier_decrement_and_dual_norm(problem, problem.start)
    if not lam_F < math.sqrt(problem.alpha) * problem.lambda1:
        raise PreconditionViolated(
            f"start is not centered: lambda_F = {lam_F:.4g} >= sqrt(alpha) l1")
    if dn == 0.0:
        return 0.0
    return (math.sqrt(problem.alpha) * problem.lambda1 - lam_F) / dn


def suboptimality_bound(t, theta, alpha, lam):
    """(2 theta + alpha rho(lambda)) / t, valid for lambda < 1/3."""
    if not lam < 1.0 / 3.0:
        raise ValueError("bound requires lambda < 1/3")
    return (2.0 * theta + alpha * rho(lam)) / t


def time_advance_predicate(theta, alpha, c, t, t_next, lam, rtol=1e-12):
    """True when switching t -> t_next keeps the decrement below c."""
    lhs = (1.0 + math.sqrt(theta) / (c * math.sqrt(alpha))) * abs(math.log(t_next / t))
    rhs = 1.0 - lam / c
    return lhs <= rhs + rtol * max(1.0, abs(rhs))


def _largest_step(problem, t, lam):
    """Largest log(t'/t) passing the predicate with c = l1, by bisection."""
    lo, hi = 0.0, 1.0
    args = (problem.theta, problem.alpha, problem.lambda1, t)
    while time_advance_predicate(*args, t * math.exp(hi), lam):
        lo, hi = hi, 2.0 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if time_advance_predicate(*args, t * math.exp(mid), lam):
            lo = mid
        else:
            hi = mid
    return lo


def main_stage(problem, trace=None, check=True):
    """Run the path-following method; returns (point, trace).

    With ``check`` on, every step asserts lambda <= l1 before and <= l2 after
    the Newton iterate, as the centering invariant requires.
    """
    trace = SolveTrace() if trace is None else trace
    f, F = problem.objective, problem.barrier.function
    m = F.manifold
    alpha, theta, eps = problem.alpha, problem.theta, problem.epsilon
    t0 = t0_init(problem)
    trace.t0 = t0
    p = problem.start
    if t0 == 0.0:
        trace.append(0, 0.0, 0.0, f.value(p), 0.0)
        return p, trace
    k = problem.rate
    jf, jF = f.jet(p), F.jet(p)
    t, ell, log_t = t0, 0, math.log(t0)
    tol = 1e-9
    while True:
        st = newton_from_jet(m, p, t * jf[0] + jF[0], t * jf[1] + jF[1], t * jf[2] + jF[2], alpha)
        if check and st.decrement > problem.lambda1 + tol:
            raise AssertionBreach(f"lambda {st.decrement:.6g} > l1 at step {ell}")
        p = newton_iterate(st)
        jf, jF = f.jet(p), F.jet(p)
        post = newton_from_jet(m, p, t * jf[0] + jF[0], t * jf[1] + jF[1], t * jf[2] + jF[2], alpha)
        if check and post.decrement > problem.lambda2 + tol:
            raise AssertionBreach(f"lambda {post.decrement:.6g} > l2 after step {ell}")
        gap = 2.0 * (theta + alpha) / t
        trace.append(ell, t, post.decrement, jf[0], gap)
        trace.path_iters += 1
        if gap <= eps:
            return p, trace
        if trace.path_iters >= problem.max_iter:
            raise MaxIterations(f"path following hit {problem.max_iter} steps")
        ell += 1
        if problem.adaptive:
            log_t += _largest_step(problem, t, post.decrement)
        else:
            log_t = math.log(t0) + ell * k
        t = math.exp(log_t)


__all__ = [
    "PathProblem", "SolveTrace", "t0_init", "main_stage", "suboptimality_bound",
    "time_advance_predicate", "barrier_decrement_and_dual_norm", "TRACE_HEADER",
]
