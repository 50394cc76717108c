"""Shared numerical plumbing: complex quadrature, graded grids, cumulative
integrals, finite-difference stencils.

Adaptive quadrature is QUADPACK (scipy.integrate.quad) applied to real and
imaginary parts; cumulative integrals over fixed grids use a vectorized
adaptive Gauss-Kronrod 15(7) rule; ODE integration elsewhere uses scipy's
DOP853 with complex state.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import BPoly, CubicSpline

__all__ = [
    "quad_complex", "graded_grid", "CumulativeIntegral", "fd_deriv",
    "fd_second_from_deriv", "NumericsError", "gk_segments",
]


class NumericsError(RuntimeError):
    pass


def quad_complex(f, a, b, epsabs=1e-12, epsrel=1e-10, limit=200, points=None):
    """Adaptive quadrature of a complex-valued integrand on [a, b].

    Returns (value, error_estimate); the estimate is the sum of the
    QUADPACK estimates for the two parts.
    """
    kw = dict(epsabs=epsabs, epsrel=epsrel, limit=limit)
    if points is not None:
        pts = [p for p in points if min(a, b) < p < max(a, b)]
        if pts:
            kw["points"] = pts
    with warnings.catch_warnings():
        # Roundoff-limited segments are expected on noise-level integrands;
        # the returned error estimate is what callers act on.
        warnings.simplefilter("ignore", IntegrationWarning)
        re, ere = quad(lambda x: np.real(f(x)), a, b, **kw)
        im, eim = quad(lambda x: np.imag(f(x)), a, b, **kw)
    return re + 1j * im, ere + eim


# 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714])
_WG7 = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327])

_GK_NODES = np.concatenate((-_XGK[:7], [0.0], _XGK[6::-1]))
_GK_WK = np.concatenate((_WGK[:7], [_WGK[7]], _WGK[6::-1]))
_GK_WG = np.zeros(15)
_GK_WG[1:14:2] = np.concatenate((_WG7[:3], [_WG7[3]], _WG7[2::-1]))


def _gk15_batch(f, a, b):
    """Kronrod-15 and Gauss-7 values on a batch of segments [a_i, b_i].

    ``f`` must accept a flat float array.  Returns (k15, err) arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GK_NODES[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=complex).reshape(pts.shape)
    k15 = half * np.sum(vals * _GK_WK, axis=1)
    g7 = half * np.sum(vals * _GK_WG, axis=1)
    return k15, np.abs(k15 - g7)


def gk_segments(f, grid, epsabs=1e-13, epsrel=1e-11, max_depth=12):
    """Adaptive segment integrals int_{grid[i]}^{grid[i+1]} f, vectorized.

    Segments whose Kronrod-Gauss discrepancy exceeds the tolerance are
    bisected (in batch) up to ``max_depth`` rounds.  Returns (per-segment
    integrals, total error estimate).
    """
    grid = np.asarray(grid, dtype=float)
    a = grid[:-1].copy()
    b = grid[1:].copy()
    owner = np.arange(len(a))
    out = np.zeros(len(a), dtype=complex)
    err_out = np.zeros(len(a), dtype=float)
    for depth in range(max_depth):
        k15, err = _gk15_batch(f, a, b)
        scale = np.maximum(np.abs(k15), 1e-300)
        ok = (err <= np.maximum(epsabs / max(len(grid) - 1, 1), epsrel * scale))
        if depth == max_depth - 1:
            ok = np.ones_like(ok)
        np.add.at(out, owner[ok], k15[ok])
        np.add.at(err_out, owner[ok], err[ok])
        if np.all(ok):
            break
        a_bad, b_bad, o_bad = a[~ok], b[~ok], owner[~ok]
        mid = 0.5 * (a_bad + b_bad)
        a = np.concatenate((a_bad, mid))
        b = np.concatenate((mid, b_bad))
        owner = np.concatenate((o_bad, o_bad))
    return out, float(np.sum(err_out))


def graded_grid(a, b, special=(), n_base=200, min_spacing=1e-7, levels=28,
                span_factor=1.0):
    """Sorted grid on [a, b]: uniform backbone plus geometric refinement
    towards each point in ``special`` down to ``min_spacing``."""
    if not b > a:
        raise ValueError("graded_grid needs b > a")
    pts = [np.linspace(a, b, n_base)]
    width = (b - a) * 0.25 * span_factor
    for s in special:
        if not (a <= s <= b):
            continue
        offs = width * np.geomspace(min_spacing / max(width, min_spacing), 1.0, levels)
        for sign in (-1.0, 1.0):
            q = s + sign * offs
            pts.append(q[(q >= a) & (q <= b)])
        pts.append(np.array([s]))
    g = np.unique(np.concatenate(pts))
    keep = np.concatenate(([True], np.diff(g) > min_spacing * 1e-3))
    g = g[keep]
    for endpoint in (a, b):
        if abs(g[0 if endpoint == a else -1] - endpoint) > 0:
            g = np.concatenate(([a], g)) if endpoint == a else np.concatenate((g, [b]))
    return g


class CumulativeIntegral:
    """Cumulative integral F(x) = int_{x0}^{x} f of a smooth complex
    integrand, built by vectorized adaptive Gauss-Kronrod quadrature on a
    fixed grid and interpolated between nodes with a C^1 piecewise
    polynomial that matches the integrand at the nodes.

    ``f`` must accept float arrays (wrap scalar integrands with
    ``np.vectorize`` or an equivalent)."""

    def __init__(self, grid, f, x0=None, epsabs=1e-13, epsrel=1e-11):
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        self.grid = grid
        seg, err = gk_segments(f, grid, epsabs=epsabs, epsrel=epsrel)
        vals = np.concatenate(([0.0], np.cumsum(seg)))
        self.error_estimate = err
        fx = np.asarray(f(grid), dtype=complex)
        data = np.column_stack([vals, fx])
        self._interp_re = BPoly.from_derivatives(grid, np.real(data))
        self._interp_im = BPoly.from_derivatives(grid, np.imag(data))
        self._node_vals = vals
        if x0 is None:
            self._offset = 0.0 + 0.0j
        else:
            self._offset = self._raw(float(x0))

    def _raw(self, x):
        return self._interp_re(x) + 1j * self._interp_im(x)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
            raise NumericsError("cumulative integral evaluated outside its grid")
        return self._raw(np.clip(x, lo, hi)) - self._offset

    def rebase(self, x0):
        """Return values measured from a new lower limit x0."""
        self._offset = self._raw(float(x0))
        return self


_FD4_W1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_FD4_OFF = np.array([-2, -1, 0, 1, 2], dtype=float)


def fd_deriv(f, y, h):
    """4th-order central first derivative of a callable."""
    vals = np.array([f(y + o * h) for o in _FD4_OFF])
    return np.dot(_FD4_W1, vals) / h


def fd_second_from_deriv(deriv, y, h):
    """Second derivative via 4th-order differencing of a first-derivative
    callable (better conditioned than differencing values twice)."""
    return fd_deriv(deriv, y, h)


def cubic_spline_complex(x, y):
    """CubicSpline accepting complex data (scipy handles complex natively)."""
    return CubicSpline(np.asarray(x, dtype=float), np.asarray(y, dtype=complex))
