"""Closed-form Riemannian geometry for the supported Hadamard manifolds.

Points and tangents are plain numpy arrays (tuples of arrays on products).
Every manifold exposes the same pure-function interface: ``inner``, ``norm``,
``exp``, ``log``, ``dist``, ``transport``, ``tangent_basis``, ``from_coords``,
``to_coords``, ``random_point`` and ``random_tangent``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .exceptions import DomainError, ManifoldMismatch, UnsupportedManifold

_SMALL = 1e-6


def _sinhc(x):
    """sinh(x)/x with a series branch near zero."""
    x = abs(x)
    if x < _SMALL:
        return 1.0 + x * x / 6.0
    return math.sinh(x) / x


# ---------------------------------------------------------------------------
# Hermitian matrix functions
# ---------------------------------------------------------------------------


def hermitize(a):
    return 0.5 * (a + a.conj().T)


def _eigh_pd(a, what="matrix"):
    w, v = np.linalg.eigh(hermitize(a))
    if w[0] <= 1e-14 * max(w[-1], 1e-300):
        raise DomainError(f"{what} is not positive definite (min eigenvalue {w[0]:.3e})")
    return w, v


def hfunc(a, fn, pd=True):
    """Apply a scalar function to a Hermitian matrix through its eigendecomposition."""
    if pd:
        w, v = _eigh_pd(a)
    else:
        w, v = np.linalg.eigh(hermitize(a))
    return (v * fn(w)) @ v.conj().T


def sqrtm_pd(a):
    return hfunc(a, np.sqrt)


def invsqrtm_pd(a):
    return hfunc(a, lambda w: 1.0 / np.sqrt(w))


def logm_pd(a):
    return hfunc(a, np.log)


def expm_h(a):
    return hfunc(a, np.exp, pd=False)


def powm_pd(a, s):
    return hfunc(a, lambda w: w**s)


def herm_basis(n, traceless=False):
    """Orthonormal basis of Herm(n) under the Hilbert-Schmidt inner product.

    Order: diagonal units, then for k < l the real symmetric and the imaginary
    antisymmetric units.  With ``traceless`` the diagonal block is replaced by
    an orthonormal basis of the trace-zero diagonal matrices.
    """
    out = []
    if traceless:
        for k in range(1, n):
            d = np.zeros(n)
            d[:k] = 1.0
            d[k] = -k
            d /= np.linalg.norm(d)
            out.append(np.diag(d).astype(complex))
    else:
        for k in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[k, k] = 1.0
            out.append(e)
    s = 1.0 / math.sqrt(2.0)
    for k in range(n):
        for l in range(k + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[k, l] = e[l, k] = s
            out.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[k, l] = -1j * s
            e[l, k] = 1j * s
            out.append(e)
    return out


# ---------------------------------------------------------------------------
# Manifolds
# ---------------------------------------------------------------------------


class Manifold:
    """Common interface.  Subclasses are immutable value objects."""

    kind: str
    dim: int

    def inner(self, p, u, v):
        raise NotImplementedError

    def norm(self, p, u):
        return math.sqrt(max(self.inner(p, u, u), 0.0))

    def from_coords(self, p, c):
        """Tangent vector with coordinates ``c`` in ``tangent_basis(p)``."""
        basis = self.tangent_basis(p)
        out = self.zero_tangent(p)
        for ci, b in zip(c, basis):
            out = self.add(out, b, ci)
        return out

    def to_coords(self, p, u):
        return np.array([self.inner(p, b, u) for b in self.tangent_basis(p)])

    def random_tangent(self, p, rng, scale=1.0):
        c = rng.standard_normal(self.dim)
        return self.from_coords(p, scale * c)

    def random_point(self, rng, spread=1.0, base=None):
        base = self.origin() if base is None else base
        return self.exp(base, self.random_tangent(base, rng, spread))

    def geodesic(self, p, u, t):
        return self.exp(p, self.scale(u, t))

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Euclidean(Manifold):
    n: int
    kind: str = field(default="euclidean", init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def dim(self):
        return self.n

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.n,):
            raise ManifoldMismatch(f"expected shape ({self.n},), got {p.shape}")
        return p

    check_tangent = staticmethod(lambda p, u: np.asarray(u, dtype=float))

    def origin(self):
        return np.zeros(self.n)

    def zero_tangent(self, p):
        return np.zeros(self.n)

    def add(self, u, v, c=1.0):
        return u + c * v

    def scale(self, u, c):
        return c * u

    def inner(self, p, u, v):
        return float(np.dot(u, v))

    def exp(self, p, u):
        return p + u

    def log(self, p, q):
        return q - p

    def dist(self, p, q):
        return float(np.linalg.norm(q - p))

    def transport(self, p, q, u):
        return np.array(u, dtype=float)

    def tangent_basis(self, p):
        return list(np.eye(self.n))

    def from_coords(self, p, c):
        return np.asarray(c, dtype=float).copy()

    def to_coords(self, p, u):
        return np.asarray(u, dtype=float).copy()

    def to_dict(self):
        return {"kind": "euclidean", "n": self.n}


@dataclass(frozen=True)
class Hyperboloid(Manifold):
    """Model space of constant curvature -kappa as the upper sheet of a hyperboloid.

    Points are x in R^{n+1} with <x, x>_L = -1/kappa and x_0 > 0, where
    <x, y>_L = -x_0 y_0 + sum_i x_i y_i.
    """

    n: int
    kappa: float = 1.0
    kind: str = field(default="hyperboloid", init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    @property
    def dim(self):
        return self.n

    @property
    def radius(self):
        return 1.0 / math.sqrt(self.kappa)

    @staticmethod
    def minkowski(x, y):
        return float(-x[0] * y[0] + np.dot(x[1:], y[1:]))

    def check_point(self, p, tol=1e-9):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.n + 1,):
            raise ManifoldMismatch(f"expected shape ({self.n + 1},), got {p.shape}")
        c = -self.kappa * self.minkowski(p, p)
        if p[0] <= 0 or abs(c - 1.0) > tol * max(1.0, abs(p[0]) ** 2 * self.kappa):
            raise ManifoldMismatch("point violates the hyperboloid constraint")
        return p

    def check_tangent(self, p, u, tol=1e-9):
        u = np.asarray(u, dtype=float)
        scale = max(1.0, np.linalg.norm(p) * np.linalg.norm(u))
        if abs(self.minkowski(p, u)) > tol * scale:
            raise ManifoldMismatch("tangent is not Minkowski-orthogonal to its base point")
        return u

    def normalize(self, x):
        x = np.asarray(x, dtype=float)
        return x / math.sqrt(-self.kappa * self.minkowski(x, x))

    def origin(self):
        x = np.zeros(self.n + 1)
        x[0] = self.radius
        return x

    def from_spatial(self, y):
        """Point with spatial coordinates ``y`` (x_0 is solved from the constraint)."""
        y = np.asarray(y, dtype=float)
        return np.concatenate([[math.sqrt(1.0 / self.kappa + y @ y)], y])

    def project(self, p, v):
        return v + self.kappa * self.minkowski(p, v) * p

    def zero_tangent(self, p):
        return np.zeros(self.n + 1)

    def add(self, u, v, c=1.0):
        return u + c * v

    def scale(self, u, c):
        return c * u

    def inner(self, p, u, v):
        return self.minkowski(u, v)

    def exp(self, p, u):
        nu = self.norm(p, u)
        s = math.sqrt(self.kappa) * nu
        x = math.cosh(s) * p + _sinhc(s) * u
        return self.normalize(x)

    def dist(self, p, q):
        d = p - q
        chord2 = max(self.minkowski(d, d), 0.0)
        return 2.0 * self.radius * math.asinh(math.sqrt(chord2) / (2.0 * self.radius))

    def log(self, p, q):
        d = self.dist(p, q)
        v = (q - p) + self.kappa * self.minkowski(p, q - p) * p
        nv = self.norm(p, v)
        if nv == 0.0:
            return np.zeros(self.n + 1)
        return (d / nv) * v

    def transport(self, p, q, u):
        k = self.kappa
        c = k * self.minkowski(q, u) / (1.0 - k * self.minkowski(p, q))
        return u + c * (p + q)

    def tangent_basis(self, p):
        out = []
        for i in range(1, self.n + 1):
            e = np.zeros(self.n + 1)
            e[i] = 1.0
            v = self.project(p, e)
            for b in out:
                v = v - self.minkowski(b, v) * b
            out.append(v / math.sqrt(self.minkowski(v, v)))
        return out

    def basis_matrix(self, p):
        return np.array(self.tangent_basis(p))

    def from_coords(self, p, c):
        return np.asarray(c, dtype=float) @ self.basis_matrix(p)

    def to_coords(self, p, u):
        b = self.basis_matrix(p)
        return b[:, 1:] @ u[1:] - b[:, 0] * u[0]

    def to_dict(self):
        return {"kind": "hyperboloid", "n": self.n, "kappa": self.kappa}


@dataclass(frozen=True)
class PDHermitian(Manifold):
    """Complex Hermitian positive-definite n x n matrices with the affine-invariant metric.

    With ``traceless`` the tangent spaces are restricted to Tr[P^{-1} U] = 0,
    which is the determinant-one (SL) slice through the identity.
    """

    n: int
    traceless: bool = False
    kind: str = field(default="pd_hermitian", init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.traceless and self.n < 2:
            raise ValueError("traceless slice needs n >= 2")

    @property
    def dim(self):
        return self.n * self.n - (1 if self.traceless else 0)

    @cached_property
    def _identity_basis(self):
        return np.array(herm_basis(self.n, self.traceless))

    def check_point(self, p, tol=1e-12):
        p = np.asarray(p, dtype=complex)
        if p.shape != (self.n, self.n):
            raise ManifoldMismatch(f"expected shape ({self.n}, {self.n}), got {p.shape}")
        scale = max(1.0, float(np.max(np.abs(p))))
        if np.max(np.abs(p - p.conj().T)) > tol * scale:
            raise ManifoldMismatch("matrix is not Hermitian")
        p = hermitize(p)
        if np.linalg.eigvalsh(p)[0] <= 0:
            raise ManifoldMismatch("matrix is not positive definite")
        if self.traceless and abs(np.linalg.slogdet(p)[1]) > 1e-9 * self.n:
            raise ManifoldMismatch("traceless slice requires det P = 1")
        return p

    def check_tangent(self, p, u, tol=1e-12):
        u = np.asarray(u, dtype=complex)
        scale = max(1.0, float(np.max(np.abs(u))))
        if u.shape != (self.n, self.n) or np.max(np.abs(u - u.conj().T)) > tol * scale:
            raise ManifoldMismatch("tangent is not a Hermitian matrix of the right shape")
        return hermitize(u)

    def origin(self):
        return np.eye(self.n, dtype=complex)

    def zero_tangent(self, p):
        return np.zeros((self.n, self.n), dtype=complex)

    def add(self, u, v, c=1.0):
        return u + c * v

    def scale(self, u, c):
        return c * u

    def inner(self, p, u, v):
        a = np.linalg.solve(p, u)
        b = np.linalg.solve(p, v)
        return float(np.real(np.trace(a @ b)))

    def exp(self, p, u):
        s = sqrtm_pd(p)
        si = np.linalg.inv(s)
        return hermitize(s @ expm_h(si @ u @ si.conj().T) @ s)

    def log(self, p, q):
        s = sqrtm_pd(p)
        si = np.linalg.inv(s)
        return hermitize(s @ logm_pd(si @ q @ si.conj().T) @ s)

    def dist(self, p, q):
        w = scipy.linalg.eigh(hermitize(q), hermitize(p), eigvals_only=True)
        if w[0] <= 0:
            raise DomainError("matrix is not positive definite")
        return float(math.sqrt(np.sum(np.log(w) ** 2)))

    def transport(self, p, q, u):
        s = sqrtm_pd(p)
        si = np.linalg.inv(s)
        e = s @ sqrtm_pd(si @ q @ si.conj().T) @ si
        return hermitize(e @ u @ e.conj().T)

    def geometric_mean(self, p, q):
        s = sqrtm_pd(p)
        si = np.linalg.inv(s)
        return hermitize(s @ sqrtm_pd(si @ q @ si.conj().T) @ s)

    def basis_array(self, p):
        s = sqrtm_pd(p)
        return s @ self._identity_basis @ s

    def tangent_basis(self, p):
        return list(self.basis_array(p))

    def from_coords(self, p, c):
        s = sqrtm_pd(p)
        x = np.tensordot(np.asarray(c, dtype=float), self._identity_basis, axes=1)
        return hermitize(s @ x @ s)

    def to_coords(self, p, u):
        si = invsqrtm_pd(p)
        x = si @ u @ si
        return np.real(np.einsum("akl,lk->a", self._identity_basis, x))

    def to_dict(self):
        d = {"kind": "pd_hermitian", "n": self.n}
        if self.traceless:
            d["traceless"] = True
        return d


def curvature_pd(manifold, p, x, y, z):
    """Riemann curvature R(X, Y)Z of the affine-invariant metric at ``p``."""
    if not isinstance(manifold, PDHermitian):
        raise UnsupportedManifold("curvature_pd needs a pd_hermitian manifold")
    s = sqrtm_pd(p)
    si = np.linalg.inv(s)
    xt, yt, zt = (si @ a @ si for a in (x, y, z))
    c = xt @ yt - yt @ xt
    r = -0.25 * (c @ zt - zt @ c)
    return hermitize(s @ r @ s)


def sectional_curvature_pd(manifold, p, x, y):
    num = manifold.inner(p, curvature_pd(manifold, p, x, y, y), x)
    den = manifold.inner(p, x, x) * manifold.inner(p, y, y) - manifold.inner(p, x, y) ** 2
    return num / den


@dataclass(frozen=True)
class Product(Manifold):
    """Riemannian product; points and tangents are tuples of factor arrays."""

    factors: tuple
    kind: str = field(default="product", init=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 1:
            raise ValueError("product needs at least one factor")

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    @cached_property
    def offsets(self):
        out = [0]
        for f in self.factors:
            out.append(out[-1] + f.dim)
        return tuple(out)

    def _zip(self, *args):
        for a in args:
            if len(a) != len(self.factors):
                raise ManifoldMismatch("tuple length does not match the number of factors")
        return zip(self.factors, *args)

    def check_point(self, p):
        return tuple(f.check_point(pi) for f, pi in self._zip(p))

    def check_tangent(self, p, u):
        return tuple(f.check_tangent(pi, ui) for f, pi, ui in self._zip(p, u))

    def origin(self):
        return tuple(f.origin() for f in self.factors)

    def zero_tangent(self, p):
        return tuple(f.zero_tangent(pi) for f, pi in self._zip(p))

    def add(self, u, v, c=1.0):
        return tuple(f.add(a, b, c) for f, a, b in self._zip(u, v))

    def scale(self, u, c):
        return tuple(f.scale(a, c) for f, a in self._zip(u))

    def inner(self, p, u, v):
        return sum(f.inner(pi, a, b) for f, pi, a, b in self._zip(p, u, v))

    def exp(self, p, u):
        return tuple(f.exp(pi, ui) for f, pi, ui in self._zip(p, u))

    def log(self, p, q):
        return tuple(f.log(pi, qi) for f, pi, qi in self._zip(p, q))

    def dist(self, p, q):
        return math.sqrt(sum(f.dist(pi, qi) ** 2 for f, pi, qi in self._zip(p, q)))

    def transport(self, p, q, u):
        return tuple(f.transport(pi, qi, ui) for f, pi, qi, ui in self._zip(p, q, u))

    def tangent_basis(self, p):
        zero = self.zero_tangent(p)
        out = []
        for i, (f, pi) in enumerate(self._zip(p)):
            for b in f.tangent_basis(pi):
                t = list(zero)
                t[i] = b
                out.append(tuple(t))
        return out

    def from_coords(self, p, c):
        o = self.offsets
        return tuple(f.from_coords(pi, c[o[i] : o[i + 1]]) for i, (f, pi) in enumerate(self._zip(p)))

    def to_coords(self, p, u):
        return np.concatenate([f.to_coords(pi, ui) for f, pi, ui in self._zip(p, u)])

    def random_tangent(self, p, rng, scale=1.0):
        return tuple(f.random_tangent(pi, rng, scale) for f, pi in self._zip(p))

    def to_dict(self):
        return {"kind": "product", "factors": [f.to_dict() for f in self.factors]}


def manifold_from_dict(d):
    """Build a manifold descriptor from its JSON form."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("manifold descriptor must be an object with a 'kind'")
    kind = d["kind"]
    if kind == "euclidean":
        return Euclidean(int(d["n"]))
    if kind == "hyperboloid":
        return Hyperboloid(int(d["n"]), float(d.get("kappa", 1.0)))
    if kind == "pd_hermitian":
        return PDHermitian(int(d["n"]), bool(d.get("traceless", False)))
    if kind == "product":
        return Product(tuple(manifold_from_dict(f) for f in d["factors"]))
    raise ValueError(f"unknown manifold kind {kind!r}")
