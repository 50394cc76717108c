"""Truncated Taylor-series arithmetic on complex coefficient arrays.

Series are 1-d numpy arrays ``a`` with ``a[k]`` the coefficient of ``h**k``,
all truncated at a common order.  Used to propagate high-order derivative
data through the changes of variables of the local constructions
(n-th roots, compositions, functional inversion) without finite differencing.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ps_trim", "ps_add", "ps_mul", "ps_recip", "ps_compose",
    "ps_pow_unit", "ps_deriv", "ps_invert",
]


def ps_trim(a, order):
    """Pad or cut ``a`` to ``order + 1`` coefficients."""
    a = np.asarray(a, dtype=complex)
    out = np.zeros(order + 1, dtype=complex)
    m = min(len(a), order + 1)
    out[:m] = a[:m]
    return out


def ps_add(a, b, order):
    return ps_trim(a, order) + ps_trim(b, order)


def ps_mul(a, b, order):
    """Cauchy product truncated at ``order``."""
    a = ps_trim(a, order)
    b = ps_trim(b, order)
    out = np.convolve(a, b)[: order + 1]
    return ps_trim(out, order)


def ps_recip(a, order):
    """Series of 1/a; requires a[0] != 0."""
    a = ps_trim(a, order)
    if a[0] == 0:
        raise ZeroDivisionError("reciprocal of a series with zero constant term")
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, order + 1):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1]) / a[0]
    return out


def ps_deriv(a, order=None):
    """Coefficient array of a'."""
    a = np.asarray(a, dtype=complex)
    if len(a) <= 1:
        d = np.zeros(1, dtype=complex)
    else:
        d = a[1:] * np.arange(1, len(a))
    if order is not None:
        d = ps_trim(d, order)
    return d


def ps_compose(a, b, order):
    """Series of a(b(h)); requires b[0] == 0."""
    a = ps_trim(a, order)
    b = ps_trim(b, order)
    if b[0] != 0:
        raise ValueError("composition requires inner series with zero constant term")
    # Horner in the truncated algebra.
    out = np.zeros(order + 1, dtype=complex)
    out[0] = a[order]
    for k in range(order - 1, -1, -1):
        out = ps_mul(out, b, order)
        out[0] += a[k]
    return out


def ps_pow_unit(u, q, order):
    """Series of u**q for u with u[0] == 1 and arbitrary (possibly
    fractional) exponent q, via the standard recurrence from u h' = q u' h."""
    u = ps_trim(u, order)
    if u[0] != 1.0:
        raise ValueError("ps_pow_unit requires unit constant term")
    h = np.zeros(order + 1, dtype=complex)
    h[0] = 1.0
    for k in range(1, order + 1):
        m = np.arange(1, k + 1)
        h[k] = np.dot(((q + 1) * m - k) * u[1 : k + 1], h[k - 1 :: -1]) / k
    return h


def ps_invert(t, order):
    """Functional inverse of tau = t(h) - t(0).

    ``t`` must have t[1] != 0.  Returns the series h(tau) with h(0) = 0 and
    t(h(tau)) = t[0] + tau through the given order.
    """
    t = ps_trim(t, order)
    if t[1] == 0:
        raise ValueError("series inversion requires nonzero linear coefficient")
    rest = t.copy()
    rest[0] = 0.0
    rest[1] = 0.0
    h = np.zeros(order + 1, dtype=complex)
    h[1] = 1.0 / t[1]
    # Fixed point h = (tau - rest(h)) / t[1]; each sweep gains one order.
    tau = np.zeros(order + 1, dtype=complex)
    tau[1] = 1.0
    for _ in range(order):
        h = (tau - ps_compose(rest, h, order)) / t[1]
    return h
