import math

import numpy as np
import pytest

from riemannian_ipm.exceptions import DegenerateInput, UnsupportedManifold
from riemannian_ipm.functions import KempfNess, KempfNessSpec
from riemannian_ipm.manifolds import Hyperboloid, PDHermitian
from riemannian_ipm.solvers import (
    BarycenterProblem,
    MebProblem,
    MedianProblem,
    ScalingProblem,
    barycenter_gradient_descent,
    barycenter_solve,
    collinearity_gap,
    kempf_ness_solve,
    meb_solve,
    median_solve,
    median_subgradient,
    pairwise_sq,
    scaling_alpha,
    scaling_iteration_expression,
    sum_of_distances,
)

HYP = Hyperboloid(2, 1.0)


def star(M, r, k=3, phase=0.0):
    o = M.origin()
    return [M.exp(o, np.r_[0.0, r * math.cos(phase + 2 * math.pi * j / k), r * math.sin(phase + 2 * math.pi * j / k)])
            for j in range(k)]


# --- minimum enclosing ball ---------------------------------------------------


def test_meb_segment_with_midpoint():
    o = HYP.origin()
    pts = [HYP.exp(o, np.array([0.0, 1.5, 0.0])), HYP.exp(o, np.array([0.0, -1.5, 0.0])),
           HYP.exp(o, np.array([0.0, 0.2, 0.0]))]
    r = meb_solve(MebProblem(HYP, pts, 1e-7))
    assert HYP.dist(r.center, o) <= 1e-4
    assert r.radius == pytest.approx(1.5, abs=1e-4)


def test_meb_radius_lower_bound():
    M = PDHermitian(2)
    rng = np.random.default_rng(3)
    pts = [M.random_point(rng) for _ in range(4)]
    eps = 1e-4
    r = meb_solve(MebProblem(M, pts, eps))
    R0 = math.sqrt(pairwise_sq(M, pts).max())
    assert r.radius >= R0 / 2 - eps
    assert max(M.dist(r.center, q) for q in pts) <= r.radius + 1e-9
    assert r.trace.damped_iters > 0 and r.trace.final_gap <= eps * R0


def test_meb_rejects_duplicates_and_small_S0():
    M = PDHermitian(2)
    p = np.eye(2, dtype=complex)
    q = np.diag([2.0, 1.0]).astype(complex)
    with pytest.raises(DegenerateInput):
        meb_solve(MebProblem(M, [p, p, q]))
    with pytest.raises(DegenerateInput):
        meb_solve(MebProblem(M, [p, q, 2 * q], S0=0.1))
    with pytest.raises((DegenerateInput, ValueError)):
        meb_solve(MebProblem(M, [p, q]))


# --- geometric median ---------------------------------------------------------


def test_median_of_symmetric_star():
    r = median_solve(MedianProblem(HYP, star(HYP, 1.0, 5, 0.3), 1e-6))
    assert HYP.dist(r.median, HYP.origin()) <= 1e-4


def test_median_near_flat_matches_fermat_weber():
    # equilateral triangle with unit sides: the flat Fermat point gives sqrt(3)
    M = Hyperboloid(2, 1e-4)
    side = 1.0
    pts = star(M, side / math.sqrt(3))
    r = median_solve(MedianProblem(M, pts, 1e-6))
    assert r.objective == pytest.approx(math.sqrt(3), abs=1e-2)


def test_median_matches_subgradient():
    rng = np.random.default_rng(4)
    pts = [HYP.random_point(rng) for _ in range(4)]
    r = median_solve(MedianProblem(HYP, pts, 1e-6))
    _, val = median_subgradient(HYP, pts, steps=20_000)
    assert r.objective <= val + 1e-3
    assert r.objective == pytest.approx(sum_of_distances(HYP, pts, r.median))


def test_median_rejects_collinear_points():
    o = HYP.origin()
    pts = [HYP.exp(o, np.array([0.0, s, 0.0])) for s in (-1.0, 0.5, 2.0)]
    assert collinearity_gap(HYP, pts) <= 1e-12
    with pytest.raises(DegenerateInput, match="points lie on one geodesic"):
        median_solve(MedianProblem(HYP, pts))


def test_median_only_on_hyperboloids():
    M = PDHermitian(2)
    pts = [M.random_point(np.random.default_rng(i)) for i in range(3)]
    with pytest.raises(UnsupportedManifold):
        median_solve(MedianProblem(M, pts))


# --- barycenter ---------------------------------------------------------------


def test_barycenter_symmetric_triple():
    r = barycenter_solve(BarycenterProblem(HYP, star(HYP, 0.8), 1e-9))
    assert HYP.dist(r.point, HYP.origin()) <= 1e-5


def test_barycenter_single_point():
    p = HYP.random_point(np.random.default_rng(5))
    r = barycenter_solve(BarycenterProblem(HYP, [p]))
    assert r.objective == 0.0 and HYP.dist(r.point, p) == 0.0


@pytest.mark.parametrize("kappa", [0.5, 2.0])
def test_barycenter_matches_gradient_descent(kappa):
    M = Hyperboloid(3, kappa)
    rng = np.random.default_rng(6)
    pts = [M.random_point(rng) for _ in range(4)]
    r = barycenter_solve(BarycenterProblem(M, pts, 1e-8))
    gd, _ = barycenter_gradient_descent(M, pts)
    assert M.dist(r.point, gd) <= 1e-4


# --- Kempf-Ness scaling -------------------------------------------------------


def test_scaling_alpha_for_three_factors():
    assert scaling_alpha(math.sqrt(3)) == pytest.approx(11 / 36, rel=1e-14)
    assert scaling_iteration_expression(8.0, 11 / 36, 1e-4) == pytest.approx(576.8895503861911, rel=1e-12)


def test_scaling_single_factor_hits_ball_boundary():
    spec = KempfNessSpec((2,), np.array([1.0, 0.0]))
    r = kempf_ness_solve(ScalingProblem(spec, 0.5, 1e-4))
    assert r.value == pytest.approx(-1.0, abs=1e-4 + 1e-6)
    assert r.value >= -1.0


def test_scaling_reduces_marginal_residual():
    rng = np.random.default_rng(7)
    v = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    spec = KempfNessSpec((2, 2), v, traceless=True)
    I = tuple(np.eye(2, dtype=complex) for _ in range(2))
    start = KempfNess(spec).marginal_residual(I)
    r = kempf_ness_solve(ScalingProblem(spec, 8.0, 1e-6))
    assert r.marginal_residual < start
    assert r.marginal_residual <= 1e-2
