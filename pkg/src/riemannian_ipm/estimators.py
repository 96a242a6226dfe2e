"""scikit-learn style estimators wrapping the solvers.

Inputs are sequences of manifold points rather than 2-d arrays, so the
estimators do their own validation; parameter handling (get_params,
set_params, clone) comes from :class:`sklearn.base.BaseEstimator`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .functions import KempfNessSpec, apply_product
from .manifolds import Hyperboloid, Manifold, PDHermitian, sqrtm_pd
from .solvers import (
    BarycenterProblem,
    MebProblem,
    MedianProblem,
    ScalingProblem,
    barycenter_solve,
    kempf_ness_solve,
    meb_solve,
    median_solve,
)


def infer_manifold(X, kappa=1.0):
    """PD(n) for square complex/real matrices, hyperboloid(n) for vectors."""
    first = np.asarray(X[0])
    if first.ndim == 2 and first.shape[0] == first.shape[1]:
        return PDHermitian(first.shape[0])
    if first.ndim == 1 and first.shape[0] >= 2:
        return Hyperboloid(first.shape[0] - 1, kappa)
    raise ValueError("cannot infer a manifold from points of shape %s" % (first.shape,))


def check_points(X, manifold=None, kappa=1.0, min_points=1):
    """Validate a sequence of manifold points; returns (manifold, list of arrays)."""
    if X is None or len(X) < min_points:
        raise ValueError(f"expected at least {min_points} points")
    M = manifold if manifold is not None else infer_manifold(X, kappa)
    if not isinstance(M, Manifold):
        raise TypeError("manifold must be a Manifold instance")
    dtype = complex if isinstance(M, PDHermitian) else float
    pts = [np.asarray(x, dtype=dtype) for x in X]
    for q in pts:
        M.check_point(q)
    return M, pts


class _PointEstimator(BaseEstimator, TransformerMixin):
    """Shared transform: distances from each input point to the fitted location."""

    _location = None

    def transform(self, X):
        check_is_fitted(self, self._location)
        M, pts = check_points(X, self.manifold_)
        c = getattr(self, self._location)
        return np.array([[M.dist(c, q)] for q in pts])


class MinimumEnclosingBall(_PointEstimator):
    """Smallest geodesic ball containing the points.

    Fitted attributes: ``center_``, ``radius_``, ``manifold_``, ``trace_``,
    ``n_iter_``.
    """

    _location = "center_"

    def __init__(self, epsilon=1e-6, manifold=None, kappa=1.0, adaptive=False):
        self.epsilon = epsilon
        self.manifold = manifold
        self.kappa = kappa
        self.adaptive = adaptive

    def fit(self, X, y=None):
        M, pts = check_points(X, self.manifold, self.kappa, 3)
        r = meb_solve(MebProblem(M, pts, self.epsilon, self.adaptive))
        self.manifold_, self.center_, self.radius_ = M, r.center, r.radius
        self.trace_, self.n_iter_ = r.trace, r.trace.path_iters
        return self

    def predict(self, X):
        """True for points inside the fitted ball (up to 1e-9)."""
        return self.transform(X)[:, 0] <= self.radius_ + 1e-9


class GeometricMedian(_PointEstimator):
    """Minimizer of the sum of distances on a hyperboloid.

    Fitted attributes: ``median_``, ``objective_``, ``manifold_``, ``trace_``, ``n_iter_``.
    """

    _location = "median_"

    def __init__(self, epsilon=1e-6, manifold=None, kappa=1.0, adaptive=False):
        self.epsilon = epsilon
        self.manifold = manifold
        self.kappa = kappa
        self.adaptive = adaptive

    def fit(self, X, y=None):
        M, pts = check_points(X, self.manifold, self.kappa, 3)
        r = median_solve(MedianProblem(M, pts, self.epsilon, self.adaptive))
        self.manifold_, self.median_, self.objective_ = M, r.median, r.objective
        self.trace_, self.n_iter_ = r.trace, r.trace.path_iters
        return self


class RiemannianBarycenter(_PointEstimator):
    """Minimizer of the sum of squared distances on a hyperboloid.

    Fitted attributes: ``barycenter_``, ``objective_``, ``manifold_``, ``trace_``, ``n_iter_``.
    """

    _location = "barycenter_"

    def __init__(self, epsilon=1e-8, manifold=None, kappa=1.0, adaptive=False):
        self.epsilon = epsilon
        self.manifold = manifold
        self.kappa = kappa
        self.adaptive = adaptive

    def fit(self, X, y=None):
        M, pts = check_points(X, self.manifold, self.kappa, 1)
        r = barycenter_solve(BarycenterProblem(M, pts, self.epsilon, self.adaptive))
        self.manifold_, self.barycenter_, self.objective_ = M, r.point, r.objective
        self.trace_, self.n_iter_ = r.trace, r.trace.path_iters
        return self


class KempfNessScaling(BaseEstimator, TransformerMixin):
    """Tensor scaling by minimizing log <v| P_1 x ... x P_k |v> over a geodesic ball.

    ``fit`` takes a tensor; ``transform`` applies the fitted scaling
    (P_1^{1/2} x ... x P_k^{1/2}) and normalizes.  Fitted attributes:
    ``scalings_``, ``value_``, ``marginal_residual_``, ``trace_``, ``n_iter_``.
    """

    def __init__(self, S0=8.0, epsilon=1e-6, traceless=True, weight_norm=None, adaptive=False):
        self.S0 = S0
        self.epsilon = epsilon
        self.traceless = traceless
        self.weight_norm = weight_norm
        self.adaptive = adaptive

    def fit(self, X, y=None):
        v = np.asarray(X, dtype=complex)
        if v.ndim < 1 or not np.any(v):
            raise ValueError("expected a nonzero tensor")
        spec = KempfNessSpec(v.shape, v, self.traceless, self.weight_norm)
        r = kempf_ness_solve(ScalingProblem(spec, self.S0, self.epsilon, self.adaptive))
        self.scalings_, self.value_ = r.point, r.value
        self.marginal_residual_, self.trace_, self.n_iter_ = r.marginal_residual, r.trace, r.trace.path_iters
        return self

    def transform(self, X):
        check_is_fitted(self, "scalings_")
        v = np.asarray(X, dtype=complex)
        w = apply_product([sqrtm_pd(p) for p in self.scalings_], v)
        return w / np.linalg.norm(w)


__all__ = [
    "MinimumEnclosingBall", "GeometricMedian", "RiemannianBarycenter", "KempfNessScaling",
    "check_points", "infer_manifold",
]
