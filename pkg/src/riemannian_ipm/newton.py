"""Newton decrement, Newton iterates, the damped phase and the quadratic phase."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .exceptions import HessianNotPD, MaxIterations, PreconditionViolated

QUADRATIC_THRESHOLD = 1.0 - 1.0 / math.sqrt(2.0)


def rho(r):
    """-r - log(1 - r), defined for r < 1."""
    if not r < 1:
        raise ValueError("rho is only defined for r < 1")
    if abs(r) < 1e-4:
        # series avoids cancellation near zero
        return r * r / 2.0 + r**3 / 3.0 + r**4 / 4.0
    return -r - math.log1p(-r)


def cholesky_pd(h):
    """Lower Cholesky factor; raises HessianNotPD on a non-positive or tiny pivot."""
    try:
        c = linalg.cholesky(h, lower=True)
    except linalg.LinAlgError as exc:
        raise HessianNotPD("Hessian is not positive definite") from exc
    scale = max(float(np.trace(h)), 1e-300)
    if np.min(np.diag(c)) ** 2 <= 1e-12 * scale:
        raise HessianNotPD("Hessian pivot below 1e-12 of its trace")
    return c


@dataclass(frozen=True, eq=False)
class NewtonState:
    """Newton data of f at a point, in the orthonormal tangent basis."""

    point: object
    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    alpha: float
    chol: np.ndarray  # factor of the Jacobi-scaled Hessian
    step_coords: np.ndarray
    decrement: float
    manifold: object

    @property
    def step(self):
        """The Newton step as a tangent vector."""
        return self.manifold.from_coords(self.point, self.step_coords)


def newton_from_jet(manifold, p, value, g, h, alpha):
    # Jacobi equilibration keeps the pivot test meaningful for barrier Hessians
    # whose scales differ by many orders of magnitude near the boundary.
    d = np.diag(h)
    if not np.all(d > 0) or not np.all(np.isfinite(h)):
        raise HessianNotPD("Hessian has a non-positive or non-finite diagonal")
    s = 1.0 / np.sqrt(d)
    c = cholesky_pd(h * s[:, None] * s[None, :])
    n = -s * linalg.cho_solve((c, True), s * g)
    lam2 = max(-float(g @ n), 0.0) / alpha
    return NewtonState(p, float(value), g, h, float(alpha), c, n, math.sqrt(lam2), manifold)


def newton_state(f, alpha, p):
    value, g, h = f.jet(p)
    return newton_from_jet(f.manifold, p, value, g, h, alpha)


def newton_iterate(state, scale=1.0):
    """exp_p(scale * n) where n solves Hess(n, .) = -df."""
    m = state.manifold
    return m.exp(state.point, m.from_coords(state.point, scale * state.step_coords))


def damped_newton(f, alpha, p0, target, max_iter=100_000, history=None):
    """Damped Newton steps n / (1 + lambda) until lambda <= target.

    Returns (point, iterations).  When ``history`` is a list, each visited
    state's (decrement, value) is appended.
    """
    p = p0
    for it in range(max_iter + 1):
        st = newton_state(f, alpha, p)
        if history is not None:
            history.append((st.decrement, st.value))
        if st.decrement <= target:
            return p, it
        if it == max_iter:
            break
        p = newton_iterate(st, 1.0 / (1.0 + st.decrement))
    raise MaxIterations(f"damped Newton did not reach lambda <= {target} in {max_iter} steps")


def quadratic_newton(f, alpha, p, eps, max_iter=100):
    """Full Newton steps from lambda <= 1 - 1/sqrt(2) until alpha rho(lambda) <= eps."""
    st = newton_state(f, alpha, p)
    if st.decrement > QUADRATIC_THRESHOLD:
        raise PreconditionViolated(
            f"decrement {st.decrement:.4g} exceeds the quadratic-phase threshold")
    for _ in range(max_iter):
        if alpha * rho(st.decrement) <= eps:
            return st.point
        st = newton_state(f, alpha, newton_iterate(st))
    raise MaxIterations("quadratic Newton phase did not converge")


def minigap_bound(f_value, alpha, lam):
    """Lower bound f(p) - alpha rho(lambda) on inf f."""
    return f_value - alpha * rho(lam)


def quadratic_phase_bound(lam0, steps):
    """Bound (2 lambda_0)^(2^t) / 2 on the decrement after t full steps."""
    return 0.5 * (2.0 * lam0) ** (2**steps)


__all__ = [
    "rho", "NewtonState", "newton_state", "newton_from_jet", "newton_iterate", "damped_newton",
    "quadratic_newton", "minigap_bound", "quadratic_phase_bound", "cholesky_pd",
    "QUADRATIC_THRESHOLD",
]
