import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riemannian_ipm import suites
from riemannian_ipm.exceptions import HessianNotPD, MaxIterations, PreconditionViolated
from riemannian_ipm.functions import Quadratic, distsq
from riemannian_ipm.manifolds import Euclidean, PDHermitian
from riemannian_ipm.newton import (
    QUADRATIC_THRESHOLD,
    cholesky_pd,
    damped_newton,
    minigap_bound,
    newton_iterate,
    newton_state,
    quadratic_newton,
    quadratic_phase_bound,
    rho,
)


def half_norm_sq(n):
    return Quadratic(Euclidean(n), 0.5 * np.eye(n), np.zeros(n), 0.0)


@pytest.mark.parametrize("r, expected", [(0.0, 0.0), (0.5, 0.1931471805599453), (-1.0, 0.3068528194400547),
                                         (0.2, 0.0231435513142098), (1 / 9, 0.006671924545272351)])
def test_rho_values(r, expected):
    assert rho(r) == pytest.approx(expected, rel=1e-9, abs=1e-300)


@given(st.floats(-0.9, 0.9))
@settings(max_examples=100, deadline=None)
def test_rho_series_matches_log_form(r):
    if abs(r) > 1e-3:
        assert rho(r) == pytest.approx(-r - math.log(1 - r), rel=1e-12)
    assert rho(r) >= 0


def test_rho_domain():
    with pytest.raises(ValueError):
        rho(1.0)


def test_decrement_of_half_norm():
    st_ = newton_state(half_norm_sq(2), 1.0, np.array([3.0, 4.0]))
    assert st_.decrement == pytest.approx(5.0, rel=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_decrement_of_distsq_pd3(seed):
    assert suites.trial_decrement(seed, 0) <= 1e-8


def test_decrement_zero_at_minimizer():
    M = PDHermitian(2)
    p0 = M.random_point(np.random.default_rng(0))
    assert newton_state(distsq(M, p0), 1.0, p0).decrement == pytest.approx(0.0, abs=1e-12)


def test_full_step_minimizes_quadratic():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 3))
    f = Quadratic(Euclidean(3), A @ A.T + np.eye(3), rng.standard_normal(3), 0.0)
    p = newton_iterate(newton_state(f, 1.0, rng.standard_normal(3)))
    assert newton_state(f, 1.0, p).decrement == pytest.approx(0.0, abs=1e-12)


def test_full_step_on_pd_distsq_reaches_base():
    M = PDHermitian(2)
    f = distsq(M, np.eye(2, dtype=complex))
    p = newton_iterate(newton_state(f, 1.0, np.diag([math.e, 1.0]).astype(complex)))
    np.testing.assert_allclose(p, np.eye(2), atol=1e-13)


def test_contraction_on_meb_barrier():
    # drive the barrier to lambda ~ 0.2, then take one full step
    M, pts, S0, B = suites.meb_instance(1)
    p, _ = damped_newton(B.function, 1.0, (pts[0], np.array([1.5 * S0])), 0.2)
    lam0 = newton_state(B.function, 1.0, p).decrement
    lam1 = newton_state(B.function, 1.0, newton_iterate(newton_state(B.function, 1.0, p))).decrement
    assert lam1 <= (lam0 / (1 - lam0)) ** 2 + 1e-10


def test_damped_step_one_dimensional():
    f = half_norm_sq(1)
    p, it = damped_newton(f, 1.0, np.array([1.0]), 0.9, max_iter=1)
    assert it == 1
    assert p[0] == pytest.approx(0.5, rel=1e-15)
    assert f.value(p) <= f.value(np.array([1.0])) - rho(-1.0)


def test_damped_history_decreases():
    M, pts, S0, B = suites.meb_instance(2)
    hist = []
    damped_newton(B.function, 1.0, (pts[0], np.array([1.5 * S0])), 0.125, history=hist)
    for (lam, v), (_, v_next) in zip(hist, hist[1:]):
        assert v - v_next >= rho(-lam) - 1e-9
    assert hist[-1][0] <= 0.125


def test_damped_newton_budget():
    f = distsq(PDHermitian(2), np.eye(2, dtype=complex))
    with pytest.raises(MaxIterations):
        damped_newton(f, 1.0, np.diag([1e3, 1.0]).astype(complex), 1e-12, max_iter=2)


def test_quadratic_phase():
    f = half_norm_sq(2)
    p = quadratic_newton(f, 1.0, np.array([0.1, 0.1]), 1e-12)
    np.testing.assert_allclose(p, 0, atol=1e-15)
    with pytest.raises(PreconditionViolated):
        quadratic_newton(f, 1.0, np.array([3.0, 4.0]), 1e-6)
    assert quadratic_newton(f, 1.0, np.zeros(2), 1e-6) is not None


def test_quadratic_phase_bound():
    assert quadratic_phase_bound(0.25, 3) == pytest.approx(0.5 * 0.5**8)
    assert QUADRATIC_THRESHOLD == pytest.approx(1 - 1 / math.sqrt(2))


@pytest.mark.parametrize("lam, alpha, gap", [(0.0, 1.0, 0.0), (1 / 9, 1.0, 0.0066719245),
                                             (0.5, 2.0, 0.3862943611), (0.2, 1.0, 0.0231435513)])
def test_minigap_bound(lam, alpha, gap):
    assert minigap_bound(1.0, alpha, lam) == pytest.approx(1.0 - gap, rel=1e-9)


def test_cholesky_rejects_indefinite_and_tiny_pivots():
    with pytest.raises(HessianNotPD):
        cholesky_pd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(HessianNotPD):
        cholesky_pd(np.diag([1.0, 1e-14]))
    c = cholesky_pd(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(np.diag(c), [2.0, 3.0])


def test_newton_state_rejects_degenerate_hessian():
    f = Quadratic(Euclidean(2), np.diag([1.0, 0.0]), np.zeros(2), 0.0)
    with pytest.raises(HessianNotPD):
        newton_state(f, 1.0, np.ones(2))
