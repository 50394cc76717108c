"""Half-line Green function of the Rayleigh operator and the forced solve.

The interior kernel (U_s(x)-c)^{-1} W^{-1} psi_+(min) psi_-(max) inverts
Ray with decay at infinity; a boundary multiple of psi_- restores
psi(0) = 0.  The boundary part is singular when psi_-(0) = 0, i.e. near
eigenvalues.  The adjoint operator is handled through the conjugation
Ray^t(psi) = (U_s-c)^{-1} Ray((U_s-c) psi).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .globalsol import GlobalPair, NearEigenvalueError
from .local import SolutionBranch
from .numerics import quad_complex
from .profiles import ShearProfile

__all__ = [
    "GreenKernel", "green_kernel", "interior_green", "solve_forced",
    "adjoint_conjugation_residual",
]


@dataclass
class GreenKernel:
    pair: GlobalPair
    boundary_factor: complex  # psi_+(0)/psi_-(0) / W
    profile: ShearProfile
    meta: dict = field(default_factory=dict)


def green_kernel(pair: GlobalPair, profile: ShearProfile,
                 eigen_tol: float = 1e-8) -> GreenKernel:
    ys = np.linspace(0.0, pair.y_max, 41)
    sup = float(np.max(np.abs(pair.psi_minus.value(ys))))
    pm0 = complex(pair.psi_minus.value(np.array(0.0)))
    if abs(pm0) < eigen_tol * sup:
        raise NearEigenvalueError(
            f"|psi_-(0)| = {abs(pm0):.3e} below {eigen_tol} * sup |psi_-|: "
            "near an eigenvalue, boundary kernel singular")
    pp0 = complex(pair.psi_plus.value(np.array(0.0)))
    return GreenKernel(pair=pair, boundary_factor=pp0 / pm0 / pair.wronskian,
                       profile=profile, meta={"psi_minus_0": pm0})


def interior_green(k: GreenKernel, x, y):
    """G^int(x, y) = (U_s(x)-c)^{-1} W^{-1} {psi_+(x) psi_-(y) for x < y,
    psi_-(x) psi_+(y) for x > y}; continuous across x = y."""
    pair = k.pair
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = np.asarray(k.profile.eval_deriv(x, 0), dtype=complex) - pair.c
    if np.any(u == 0):
        raise ZeroDivisionError("U_s(x) = c: interior kernel refused at a "
                                "real critical layer")
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    return (pair.psi_plus.value(lo) * pair.psi_minus.value(hi)
            / (u * pair.wronskian))


def solve_forced(k: GreenKernel, f, epsabs: float = 1e-12,
                 epsrel: float = 1e-10) -> SolutionBranch:
    """psi with Ray(psi) = f, psi(0) = 0, decay at y_max.

    psi^int(y) = int_0^{y_max} G^int(x, y) f(x) dx (split at x = y) plus the
    boundary correction -(psi_+(0)/psi_-(0)) W^{-1}
    [int (U_s-c)^{-1} psi_-(x) f(x) dx] psi_-(y).
    """
    pair = k.pair
    c = pair.c
    W = pair.wronskian
    y_max = pair.y_max
    p = k.profile

    def wf(x):
        u = complex(p.eval_deriv(x, 0)) - c
        return f(x) / u

    bint, _ = quad_complex(lambda x: complex(pair.psi_minus.value(np.asarray(x))) * wf(x),
                           0.0, y_max, epsabs=epsabs, epsrel=epsrel)
    bcoef = -k.boundary_factor * bint

    def value(y):
        y = float(y)
        left, _ = quad_complex(
            lambda x: complex(pair.psi_plus.value(np.asarray(x))) * wf(x),
            0.0, y, epsabs=epsabs, epsrel=epsrel)
        right, _ = quad_complex(
            lambda x: complex(pair.psi_minus.value(np.asarray(x))) * wf(x),
            y, y_max, epsabs=epsabs, epsrel=epsrel)
        interior = (complex(pair.psi_minus.value(np.asarray(y))) * left
                    + complex(pair.psi_plus.value(np.asarray(y))) * right) / W
        return interior + bcoef * complex(pair.psi_minus.value(np.asarray(y)))

    def deriv(y):
        y = float(y)
        left, _ = quad_complex(
            lambda x: complex(pair.psi_plus.value(np.asarray(x))) * wf(x),
            0.0, y, epsabs=epsabs, epsrel=epsrel)
        right, _ = quad_complex(
            lambda x: complex(pair.psi_minus.value(np.asarray(x))) * wf(x),
            y, y_max, epsabs=epsabs, epsrel=epsrel)
        interior = (complex(pair.psi_minus.deriv(np.asarray(y))) * left
                    + complex(pair.psi_plus.deriv(np.asarray(y))) * right) / W
        return interior + bcoef * complex(pair.psi_minus.deriv(np.asarray(y)))

    vv = np.vectorize(value, otypes=[complex])
    dv = np.vectorize(deriv, otypes=[complex])
    return SolutionBranch(value=vv, deriv=dv, branch="none",
                          meta={"method": "green-forced", "alpha": pair.alpha,
                                "c": c, "y_max": y_max,
                                "boundary_coef": bcoef})


_FD5_W2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_FD5_W1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_OFF = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


def adjoint_conjugation_residual(p: ShearProfile, alpha: float, c: complex,
                                 phi, grid, h: float | None = None) -> float:
    """max over the grid of |Ray^t(phi) - (U_s-c)^{-1} Ray((U_s-c) phi)|.

    The two sides are algebraically identical; they are evaluated through
    different derivative routes (expanded product rule vs differencing the
    product), so the residual measures pure finite-differencing error and
    shrinks at 4th order in h.
    """
    grid = np.asarray(grid, dtype=float)
    c = complex(c)
    if h is None:
        h = 1e-3 * max(1.0, float(np.ptp(grid)) / 4)
    out = 0.0
    for y in grid:
        ys = y + _OFF * h
        u = np.asarray(p.eval_deriv(ys, 0), dtype=complex) - c
        u1c = complex(p.eval_deriv(y, 1))
        u2c = complex(p.eval_deriv(y, 2))
        uc = u[2]
        ph = np.array([phi(t) for t in ys], dtype=complex)
        d1 = np.dot(_FD5_W1, ph) / h
        d2 = np.dot(_FD5_W2, ph) / (h * h)
        # expanded adjoint: (U-c) phi'' + 2 U' phi' - alpha^2 (U-c) phi
        lhs = uc * d2 + 2.0 * u1c * d1 - alpha ** 2 * uc * ph[2]
        g = u * ph
        g2 = np.dot(_FD5_W2, g) / (h * h)
        rhs = (uc * (g2 - alpha ** 2 * g[2]) - u2c * g[2]) / uc
        out = max(out, abs(lhs - rhs))
    return float(out)
