"""Interior-point methods on Riemannian manifolds.

Self-concordant functions and barriers on PD(n), hyperbolic space and their
products, Newton's method, short-step path following and solvers for
minimum enclosing balls, geometric medians, barycenters and Kempf-Ness
scaling.
"""

from .barriers import (
    Barrier,
    Compatibility,
    alpha_from_compat,
    epigraph_barrier,
    hadamard_distsq_epigraph_barrier,
    hyp_rs_epigraph_barrier,
    level_set_barrier,
    scale_sc,
    sum_sc,
)
from .estimators import GeometricMedian, KempfNessScaling, MinimumEnclosingBall, RiemannianBarycenter
from .exceptions import (
    AssertionBreach,
    DegenerateInput,
    DomainError,
    HessianNotPD,
    ManifoldMismatch,
    MaxIterations,
    NullConeUnderflow,
    NumericalFailure,
    PreconditionViolated,
    RipmError,
    UnsupportedManifold,
)
from .functions import KempfNessSpec, ScFunction, distsq, kempf_ness
from .kernels import kernel_H, kernel_Phi, kernel_T, zeta_constant
from .manifolds import Euclidean, Hyperboloid, PDHermitian, Product, curvature_pd
from .newton import damped_newton, minigap_bound, newton_iterate, newton_state, quadratic_newton, rho
from .path import PathProblem, SolveTrace, main_stage, suboptimality_bound, t0_init, time_advance_predicate
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

__version__ = "0.1.0"
