import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from riemannian_ipm import (
    GeometricMedian,
    KempfNessScaling,
    MinimumEnclosingBall,
    RiemannianBarycenter,
)
from riemannian_ipm.estimators import check_points, infer_manifold
from riemannian_ipm.exceptions import ManifoldMismatch
from riemannian_ipm.manifolds import Hyperboloid, PDHermitian

HYP = Hyperboloid(2, 1.0)


def star(r, k=3):
    o = HYP.origin()
    return [HYP.exp(o, np.r_[0.0, r * math.cos(2 * math.pi * j / k), r * math.sin(2 * math.pi * j / k)])
            for j in range(k)]


@pytest.mark.parametrize("cls", [MinimumEnclosingBall, GeometricMedian, RiemannianBarycenter, KempfNessScaling])
def test_params_and_clone(cls):
    est = cls(epsilon=1e-3)
    assert est.get_params()["epsilon"] == 1e-3
    twin = clone(est.set_params(adaptive=True))
    assert twin.get_params() == est.get_params() and twin is not est


@pytest.mark.parametrize("est, X", [(MinimumEnclosingBall(), star(1.0)), (GeometricMedian(), star(1.0)),
                                    (RiemannianBarycenter(), star(1.0)),
                                    (KempfNessScaling(), np.eye(2) / math.sqrt(2))])
def test_not_fitted(est, X):
    with pytest.raises(NotFittedError):
        est.transform(X)


def test_infer_manifold():
    assert isinstance(infer_manifold([np.eye(3)]), PDHermitian)
    M = infer_manifold([HYP.origin()], kappa=2.0)
    assert isinstance(M, Hyperboloid) and M.n == 2 and M.kappa == 2.0
    with pytest.raises(ValueError):
        infer_manifold([np.zeros((2, 3))])


def test_check_points():
    with pytest.raises(ValueError):
        check_points([HYP.origin()], min_points=3)
    with pytest.raises(ManifoldMismatch):
        check_points([np.array([2.0, 0.0, 0.0])])


def test_meb_estimator_pd():
    X = [np.diag([math.e, 1.0]), np.diag([1 / math.e, 1.0]), np.eye(2)]
    est = MinimumEnclosingBall(epsilon=1e-6).fit(X)
    assert est.radius_ == pytest.approx(1.0, abs=1e-4)
    np.testing.assert_allclose(est.center_, np.eye(2), atol=1e-4)
    d = est.transform(X)
    assert d.shape == (3, 1) and d.max() <= est.radius_ + 1e-9
    assert est.predict(X).all()
    assert not est.predict([np.diag([math.e ** 2, 1.0])]).any()
    assert est.n_iter_ == est.trace_.path_iters > 0


def test_median_estimator():
    est = GeometricMedian(epsilon=1e-6).fit(star(1.0, 5))
    assert HYP.dist(est.median_, HYP.origin()) <= 1e-4
    assert est.objective_ == pytest.approx(est.transform(star(1.0, 5)).sum(), rel=1e-9)


def test_barycenter_estimator_kappa():
    M = Hyperboloid(2, 0.5)
    pts = [M.exp(M.origin(), np.array([0.0, s, 0.0])) for s in (-0.7, 0.7)]
    est = RiemannianBarycenter(manifold=M).fit(pts)
    assert M.dist(est.barycenter_, M.origin()) <= 1e-5
    d = est.transform(pts)[:, 0]
    assert d[0] == pytest.approx(d[1], rel=1e-6)


def test_scaling_estimator_balances_marginals():
    rng = np.random.default_rng(1)
    v = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    est = KempfNessScaling(S0=8.0, epsilon=1e-6).fit(v)
    assert est.marginal_residual_ <= 1e-2
    w = est.transform(v)
    assert np.linalg.norm(w) == pytest.approx(1.0)
    # scaled marginals w w^* and w^T conj(w) are close to I/2
    np.testing.assert_allclose(w @ w.conj().T, np.eye(2) / 2, atol=5e-2)
    np.testing.assert_allclose(w.T @ w.conj(), np.eye(2) / 2, atol=5e-2)


def test_scaling_rejects_zero_tensor():
    with pytest.raises(ValueError):
        KempfNessScaling().fit(np.zeros((2, 2)))
