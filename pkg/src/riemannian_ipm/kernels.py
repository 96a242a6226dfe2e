"""Scalar kernels for the derivatives of squared distances.

All kernels are evaluated through log-ratio variables.  With
``h(x) = x coth(x / 2)`` (and ``h(0) = 2``) one has

* ``H(x, y) = h(log(x / y))``
* ``T(x, y, z) = h(a - b) * (h(a) - h(b)) / (a - b)`` with
  ``a = log(x / z)``, ``b = log(y / z)``.

Near coincident arguments the divided difference is replaced by ``h'`` at
the midpoint, and ``h``/``h'`` switch to Taylor polynomials near zero.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

_TAYLOR = 1e-3
_SPLIT = 1e-6


def _h(x):
    """x coth(x/2), vectorized, with h(0) = 2."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _TAYLOR
    xs = np.where(small, 1.0, x)
    big = xs / np.tanh(xs / 2.0)
    x2 = x * x
    return np.where(small, 2.0 + x2 / 6.0 - x2 * x2 / 360.0, big)


def _dh(x):
    """Derivative of x coth(x/2)."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _TAYLOR
    xs = np.where(small, 1.0, x)
    y = xs / 2.0
    big = 1.0 / np.tanh(y) - y / np.sinh(y) ** 2
    return np.where(small, x / 3.0 - x**3 / 90.0, big)


def _divided_h(a, b):
    """(h(a) - h(b)) / (a - b) with a midpoint-derivative branch."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a - b
    close = np.abs(d) < _SPLIT * np.maximum(1.0, np.abs(a) + np.abs(b))
    ds = np.where(close, 1.0, d)
    return np.where(close, _dh(0.5 * (a + b)), (_h(a) - _h(b)) / ds)


def _check_positive(*xs):
    for x in xs:
        if np.any(np.asarray(x) <= 0):
            raise ValueError("kernel arguments must be positive")


def kernel_H_log(a):
    """H as a function of the log-ratio a = log(x / y)."""
    return _h(a)


def kernel_T_log(a, b):
    """T as a function of a = log(x / z), b = log(y / z)."""
    return _h(np.asarray(a) - np.asarray(b)) * _divided_h(a, b)


def kernel_H(x, y):
    """(x + y) log(x / y) / (x - y), extended by H(x, x) = 2."""
    _check_positive(x, y)
    r = _h(np.log(x) - np.log(y))
    return float(r) if np.ndim(r) == 0 else r


def kernel_T(x, y, z):
    """Third-derivative kernel for the squared distance on PD(n)."""
    _check_positive(x, y, z)
    lz = np.log(z)
    r = kernel_T_log(np.log(x) - lz, np.log(y) - lz)
    return float(r) if np.ndim(r) == 0 else r


def H_matrix(logq):
    """Matrix H(q_k, q_l) from log-eigenvalues."""
    logq = np.asarray(logq, dtype=float)
    return _h(logq[:, None] - logq[None, :])


def T_tensor(logq):
    """Tensor T(q_k, q_l, q_m) from log-eigenvalues."""
    logq = np.asarray(logq, dtype=float)
    a = (logq[:, None] - logq[None, :])[:, None, :]  # log(q_k / q_m) at [k, ., m]
    b = (logq[:, None] - logq[None, :])[None, :, :]  # log(q_l / q_m) at [., l, m]
    return kernel_T_log(a, b)


def kernel_Phi(x):
    """Derivative of x coth(x): coth(x) + x - x coth(x)^2, with Phi(0) = 0."""
    x = float(x)
    if abs(x) < _TAYLOR:
        x2 = x * x
        return 2.0 * x / 3.0 - 4.0 * x * x2 / 45.0
    if abs(x) > 300.0:
        return math.copysign(1.0, x)
    return 1.0 / math.tanh(x) - x / math.sinh(x) ** 2


def x_coth_x(x):
    """x coth(x) with value 1 at zero."""
    x = float(x)
    if abs(x) < _TAYLOR:
        x2 = x * x
        return 1.0 + x2 / 3.0 - x2 * x2 / 45.0
    return x / math.tanh(x)


def _sinh_gap(x):
    """1/sinh(x) - 1/x, the function whose supremum defines zeta."""
    if abs(x) < _TAYLOR:
        return -x / 6.0 + 7.0 * x**3 / 360.0
    return 1.0 / math.sinh(x) - 1.0 / x


def _compute_zeta():
    res = optimize.minimize_scalar(_sinh_gap, bounds=(0.1, 10.0), method="bounded",
                                   options={"xatol": 1e-12})
    return abs(res.fun)


ZETA = _compute_zeta()


def zeta_constant():
    """sup_x |1/sinh(x) - 1/x|."""
    return ZETA
