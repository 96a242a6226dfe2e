"""Smooth functions on manifolds with analytic derivatives up to order three.

Every function exposes

* ``value(p)``
* ``diff(p, u)``: the differential applied to ``u``
* ``hess(p, u, v)``: the covariant Hessian
* ``third(p, w, u)``: the covariant third derivative in the form (w, u, u),
  where ``w`` is the differentiation direction (the only non-symmetric slot)
* ``jet(p)``: value, gradient coordinates and Hessian matrix in the
  orthonormal ``manifold.tangent_basis(p)``
* ``alpha``: a self-concordance constant, or ``None`` when none is claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ManifoldMismatch, NullConeUnderflow, UnsupportedManifold
from .kernels import H_matrix, T_tensor, kernel_Phi, x_coth_x
from .manifolds import Euclidean, Hyperboloid, PDHermitian, Product, hermitize, invsqrtm_pd, sqrtm_pd


class ScFunction:
    """Base class.  Subclasses override the derivative facets they can do better."""

    manifold = None
    alpha = None

    def value(self, p):
        raise NotImplementedError

    def diff(self, p, u):
        raise NotImplementedError

    def hess(self, p, u, v):
        raise NotImplementedError

    def third(self, p, w, u):
        raise NotImplementedError

    def contains(self, p):
        return True

    def jet(self, p):
        basis = self.manifold.tangent_basis(p)
        g = np.array([self.diff(p, b) for b in basis])
        d = len(basis)
        h = np.empty((d, d))
        for i in range(d):
            for j in range(i, d):
                h[i, j] = h[j, i] = self.hess(p, basis[i], basis[j])
        return self.value(p), g, h

    # Convenience combinators.
    def __add__(self, other):
        return Combination([(1.0, self), (1.0, other)])

    def __rmul__(self, c):
        return Combination([(float(c), self)])

    def with_alpha(self, alpha):
        return Combination([(1.0, self)], alpha=alpha)


# ---------------------------------------------------------------------------
# Squared distances
# ---------------------------------------------------------------------------


class EuclideanDistSq(ScFunction):
    alpha = math.inf

    def __init__(self, manifold, p0):
        self.manifold = manifold
        self.p0 = np.asarray(p0, dtype=float)

    def value(self, p):
        d = p - self.p0
        return float(d @ d)

    def diff(self, p, u):
        return float(2.0 * (p - self.p0) @ u)

    def hess(self, p, u, v):
        return float(2.0 * u @ v)

    def third(self, p, w, u):
        return 0.0

    def jet(self, p):
        d = p - self.p0
        return float(d @ d), 2.0 * d, 2.0 * np.eye(self.manifold.n)


class PDDistSq(ScFunction):
    """p -> d(p, p0)^2 on PD(n), derivatives through the H and T kernels.

    The relative position Q = p0^{-1/2} p p0^{-1/2} is diagonalized as
    V diag(q) V^*; a tangent U at p maps to U_hat = L U L^* with
    L = V^* Q^{-1/2} p0^{-1/2}.  Then df(U) = 2 sum log(q_k) U_hat_kk,
    Hess(U, V) = sum conj(U_hat_kl) V_hat_kl H(q_k, q_l) and
    third(W, U) = sum W_hat_kl U_hat_lm U_hat_mk T(q_k, q_l, q_m).
    """

    alpha = 2.0

    def __init__(self, manifold, p0):
        if not isinstance(manifold, PDHermitian):
            raise UnsupportedManifold("PDDistSq needs a pd_hermitian manifold")
        self.manifold = manifold
        self.p0 = hermitize(np.asarray(p0, dtype=complex))
        self._p0_isqrt = invsqrtm_pd(self.p0)

    def _frame(self, p):
        q = self._p0_isqrt @ p @ self._p0_isqrt
        w, v = np.linalg.eigh(hermitize(q))
        if w[0] <= 0:
            raise DomainError("point is not positive definite")
        logq = np.log(w)
        lmat = (v.conj().T / np.sqrt(w)[:, None]) @ self._p0_isqrt
        return logq, lmat

    @staticmethod
    def _hat(lmat, u):
        return lmat @ u @ lmat.conj().T

    def value(self, p):
        logq, _ = self._frame(p)
        return float(logq @ logq)

    def diff(self, p, u):
        logq, l = self._frame(p)
        return float(2.0 * np.real(np.diag(self._hat(l, u))) @ logq)

    def hess(self, p, u, v):
        logq, l = self._frame(p)
        uh, vh = self._hat(l, u), self._hat(l, v)
        return float(np.real(np.sum(uh.conj() * vh * H_matrix(logq))))

    def third(self, p, w, u):
        logq, l = self._frame(p)
        wh, uh = self._hat(l, w), self._hat(l, u)
        t = T_tensor(logq)
        return float(np.real(np.einsum("kl,lm,mk,klm->", wh, uh, uh, t)))

    def gradient(self, p):
        """Riemannian gradient -2 log_p(p0)."""
        return -2.0 * self.manifold.log(p, self.p0)

    def jet(self, p):
        logq, l = self._frame(p)
        basis = self.manifold.basis_array(p)
        hats = np.einsum("ij,ajk,lk->ail", l, basis, l.conj())
        g = 2.0 * np.real(np.einsum("akk,k->a", hats, logq))
        flat = hats.reshape(len(basis), -1)
        hm = H_matrix(logq).reshape(-1)
        h = np.real((flat.conj() * hm) @ flat.T)
        return float(logq @ logq), g, 0.5 * (h + h.T)


class HyperboloidDistSq(ScFunction):
    """p -> d(p, p0)^2 on the model space of curvature -kappa.

    With l = d(p, p0), s = sqrt(kappa) l, gamma the unit tangent at p pointing
    away from p0 and u_g = <u, gamma>:

    Hess(u, u) = 2 s coth(s) (|u|^2 - u_g^2) + 2 u_g^2
    third(w, u) = sqrt(kappa) [2 Phi(s) w_g (|u|^2 - u_g^2)
                               + 4 (s - Phi(s)) u_g (w_g u_g - <u, w>)]
    """

    def __init__(self, manifold, p0):
        if not isinstance(manifold, Hyperboloid):
            raise UnsupportedManifold("HyperboloidDistSq needs a hyperboloid manifold")
        self.manifold = manifold
        self.p0 = np.asarray(p0, dtype=float)
        self.alpha = 8.0 / manifold.kappa

    def _geo(self, p):
        m = self.manifold
        l = m.dist(p, self.p0)
        if l == 0.0:
            return 0.0, np.zeros_like(p)
        return l, -m.log(p, self.p0) / l

    def value(self, p):
        return self.manifold.dist(p, self.p0) ** 2

    def diff(self, p, u):
        l, gam = self._geo(p)
        return 2.0 * l * self.manifold.minkowski(gam, u)

    def hess(self, p, u, v):
        m = self.manifold
        l, gam = self._geo(p)
        c = x_coth_x(math.sqrt(m.kappa) * l)
        ug, vg = m.minkowski(gam, u), m.minkowski(gam, v)
        return 2.0 * c * (m.minkowski(u, v) - ug * vg) + 2.0 * ug * vg

    def third(self, p, w, u):
        m = self.manifold
        l, gam = self._geo(p)
        if l == 0.0:
            return 0.0
        sk = math.sqrt(m.kappa)
        s = sk * l
        ph = kernel_Phi(s)
        ug, wg = m.minkowski(gam, u), m.minkowski(gam, w)
        uu, uw = m.minkowski(u, u), m.minkowski(u, w)
        return sk * (2.0 * ph * wg * (uu - ug * ug) + 4.0 * (s - ph) * ug * (wg * ug - uw))

    def dg(self, p, u):
        """Differential of the (unsquared) distance."""
        _, gam = self._geo(p)
        return self.manifold.minkowski(gam, u)

    def gradient(self, p):
        return -2.0 * self.manifold.log(p, self.p0)

    def jet(self, p):
        m = self.manifold
        l, gam = self._geo(p)
        b = m.basis_matrix(p)
        gc = b[:, 1:] @ gam[1:] - b[:, 0] * gam[0]
        c = x_coth_x(math.sqrt(m.kappa) * l)
        n = m.n
        h = 2.0 * c * (np.eye(n) - np.outer(gc, gc)) + 2.0 * np.outer(gc, gc)
        return l * l, 2.0 * l * gc, h


class Lift(ScFunction):
    """f(p_i) viewed as a function on a product manifold."""

    def __init__(self, f, manifold, index, alpha=None):
        if not isinstance(manifold, Product) or manifold.factors[index] != f.manifold:
            raise ManifoldMismatch("factor does not match the lifted function's manifold")
        self.f = f
        self.manifold = manifold
        self.index = index
        self.alpha = f.alpha if alpha is None else alpha

    def value(self, p):
        return self.f.value(p[self.index])

    def diff(self, p, u):
        i = self.index
        return self.f.diff(p[i], u[i])

    def hess(self, p, u, v):
        i = self.index
        return self.f.hess(p[i], u[i], v[i])

    def third(self, p, w, u):
        i = self.index
        return self.f.third(p[i], w[i], u[i])

    def contains(self, p):
        return self.f.contains(p[self.index])

    def jet(self, p):
        v, g0, h0 = self.f.jet(p[self.index])
        o = self.manifold.offsets
        a, b = o[self.index], o[self.index + 1]
        d = self.manifold.dim
        g = np.zeros(d)
        h = np.zeros((d, d))
        g[a:b] = g0
        h[a:b, a:b] = h0
        return v, g, h


class Quadratic(ScFunction):
    """x -> x^T A x + b^T x + c on Euclidean space (A symmetric)."""

    alpha = math.inf

    def __init__(self, manifold, A, b, c=0.0):
        self.manifold = manifold
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.c = float(c)

    @classmethod
    def linear(cls, manifold, b, c=0.0):
        n = manifold.n
        return cls(manifold, np.zeros((n, n)), np.asarray(b, dtype=float), float(c))

    def value(self, p):
        return float(p @ self.A @ p + self.b @ p + self.c)

    def diff(self, p, u):
        return float(2.0 * (self.A @ p) @ u + self.b @ u)

    def hess(self, p, u, v):
        return float(2.0 * u @ self.A @ v)

    def third(self, p, w, u):
        return 0.0

    def jet(self, p):
        return self.value(p), 2.0 * self.A @ p + self.b, 2.0 * np.asarray(self.A, dtype=float)


class Combination(ScFunction):
    """const + sum_i c_i f_i on a common manifold."""

    def __init__(self, terms, const=0.0, alpha=None):
        terms = [(float(c), f) for c, f in terms]
        if not terms:
            raise ValueError("empty combination")
        self.manifold = terms[0][1].manifold
        for _, f in terms:
            if f.manifold != self.manifold:
                raise ManifoldMismatch("combined functions live on different manifolds")
        self.terms = terms
        self.const = float(const)
        self.alpha = alpha

    def value(self, p):
        return self.const + sum(c * f.value(p) for c, f in self.terms)

    def diff(self, p, u):
        return sum(c * f.diff(p, u) for c, f in self.terms)

    def hess(self, p, u, v):
        return sum(c * f.hess(p, u, v) for c, f in self.terms)

    def third(self, p, w, u):
        return sum(c * f.third(p, w, u) for c, f in self.terms)

    def contains(self, p):
        return all(f.contains(p) for _, f in self.terms)

    def jet(self, p):
        v, g, h = 0.0, 0.0, 0.0
        for c, f in self.terms:
            fv, fg, fh = f.jet(p)
            v, g, h = v + c * fv, g + c * fg, h + c * fh
        return self.const + v, g, h


class NegLog(ScFunction):
    """-log(omega) for a smooth function omega; the domain is omega > 0."""

    def __init__(self, omega, alpha=None):
        self.omega = omega
        self.manifold = omega.manifold
        self.alpha = alpha

    def _w(self, p):
        w = self.omega.value(p)
        if not w > 0:
            raise DomainError("evaluation outside the open domain")
        return w

    def contains(self, p):
        try:
            return self.omega.contains(p) and self.omega.value(p) > 0
        except DomainError:
            return False

    def value(self, p):
        return -math.log(self._w(p))

    def diff(self, p, u):
        return -self.omega.diff(p, u) / self._w(p)

    def hess(self, p, u, v):
        w = self._w(p)
        o = self.omega
        return o.diff(p, u) * o.diff(p, v) / w**2 - o.hess(p, u, v) / w

    def third(self, p, w, u):
        om = self._w(p)
        o = self.omega
        aw, au = o.diff(p, w) / om, o.diff(p, u) / om
        return (-2.0 * aw * au * au + 2.0 * au * o.hess(p, w, u) / om
                + aw * o.hess(p, u, u) / om - o.third(p, w, u) / om)

    def jet(self, p):
        w, g, h = self.omega.jet(p)
        if not w > 0:
            raise DomainError("evaluation outside the open domain")
        return -math.log(w), -g / w, np.outer(g, g) / w**2 - h / w


# ---------------------------------------------------------------------------
# Kempf-Ness functions for the tensor action of GL(n_1) x ... x GL(n_k)
# ---------------------------------------------------------------------------


def _apply_factor(mat, tensor, axis):
    moved = np.tensordot(mat, tensor, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def apply_product(mats, tensor):
    for i, m in enumerate(mats):
        tensor = _apply_factor(m, tensor, i)
    return tensor


def marginals(tensor):
    """Reduced density matrices of the normalized tensor, one per factor."""
    t = tensor / np.linalg.norm(tensor)
    out = []
    for i in range(t.ndim):
        m = np.moveaxis(t, i, 0).reshape(t.shape[i], -1)
        out.append(m @ m.conj().T)
    return out


@dataclass(frozen=True)
class KempfNessSpec:
    dims: tuple
    v: np.ndarray
    traceless: bool = False
    weight_norm: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        v = np.asarray(self.v, dtype=complex).reshape(self.dims)
        object.__setattr__(self, "v", v)
        if not np.any(v):
            raise ValueError("Kempf-Ness vector must be nonzero")
        if self.weight_norm is None:
            object.__setattr__(self, "weight_norm", math.sqrt(len(self.dims)))

    @property
    def manifold(self):
        return Product(tuple(PDHermitian(n, self.traceless) for n in self.dims))


class KempfNess(ScFunction):
    """phi_v(P_1, ..., P_k) = log <v | P_1 x ... x P_k | v>.

    Derivatives are evaluated at the identity after the isometric change of
    variables v -> (P^{1/2} x ...) v, U_i -> P_i^{-1/2} U_i P_i^{-1/2}.
    With A_U = sum_i (U_i acting on factor i) and E[X] = <v|X|v>/<v|v>:
    diff = E[A_U], Hess = Re cov(A_U, A_V),
    third(W, U) = Re cov(A_W, A_U^2 - 2 E[A_U] A_U).
    """

    alpha = None

    def __init__(self, spec):
        self.spec = spec
        self.manifold = spec.manifold

    def value(self, p):
        x = apply_product(p, self.spec.v)
        val = np.real(np.vdot(self.spec.v, x))
        if not val > 1e-300:
            raise NullConeUnderflow("<v|pi(P)|v> underflowed; vector is near the null cone")
        return math.log(val)

    def _state(self, p):
        roots = [sqrtm_pd(pi) for pi in p]
        vt = apply_product(roots, self.spec.v)
        nrm = np.real(np.vdot(vt, vt))
        if not nrm > 1e-300:
            raise NullConeUnderflow("transformed vector underflowed; vector is near the null cone")
        iroots = [np.linalg.inv(r) for r in roots]
        return vt, nrm, iroots

    @staticmethod
    def _act(iroots, u, vt):
        out = np.zeros_like(vt)
        for i, (r, ui) in enumerate(zip(iroots, u)):
            out = out + _apply_factor(r @ ui @ r.conj().T, vt, i)
        return out

    def diff(self, p, u):
        vt, nrm, ir = self._state(p)
        return float(np.real(np.vdot(vt, self._act(ir, u, vt))) / nrm)

    def hess(self, p, u, v):
        vt, nrm, ir = self._state(p)
        xu, xv = self._act(ir, u, vt), self._act(ir, v, vt)
        eu = np.real(np.vdot(vt, xu)) / nrm
        ev = np.real(np.vdot(vt, xv)) / nrm
        return float(np.real(np.vdot(xu, xv)) / nrm - eu * ev)

    def third(self, p, w, u):
        vt, nrm, ir = self._state(p)
        xw, xu = self._act(ir, w, vt), self._act(ir, u, vt)
        eu = np.real(np.vdot(vt, xu)) / nrm
        ew = np.real(np.vdot(vt, xw)) / nrm
        y = self._act(ir, u, xu) - 2.0 * eu * xu
        ey = np.real(np.vdot(vt, y)) / nrm
        return float(np.real(np.vdot(xw, y)) / nrm - ew * ey)

    def jet(self, p):
        vt, nrm, ir = self._state(p)
        xs = np.array([self._act(ir, b, vt).reshape(-1) for b in self.manifold.tangent_basis(p)])
        e = np.real(xs @ vt.reshape(-1).conj()) / nrm
        h = np.real(xs.conj() @ xs.T) / nrm - np.outer(e, e)
        return math.log(np.real(np.vdot(self.spec.v, apply_product(p, self.spec.v)))), e, 0.5 * (h + h.T)

    def marginal_residual(self, p):
        roots = [sqrtm_pd(pi) for pi in p]
        rhos = marginals(apply_product(roots, self.spec.v))
        return float(sum(np.linalg.norm(r - np.eye(len(r)) / len(r)) for r in rhos))


def kempf_ness(spec):
    return KempfNess(spec)


def distsq(manifold, p0):
    """Squared distance to ``p0`` with analytic derivatives."""
    if isinstance(manifold, PDHermitian):
        return PDDistSq(manifold, p0)
    if isinstance(manifold, Hyperboloid):
        return HyperboloidDistSq(manifold, p0)
    if isinstance(manifold, Euclidean):
        return EuclideanDistSq(manifold, np.asarray(p0, dtype=float))
    if isinstance(manifold, Product):
        parts = [Lift(distsq(f, p0[i]), manifold, i) for i, f in enumerate(manifold.factors)]
        return Combination([(1.0, t) for t in parts], alpha=min(t.alpha for t in parts))
    raise UnsupportedManifold(f"no squared distance for {manifold!r}")
