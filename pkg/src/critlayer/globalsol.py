"""Global solutions on the half line, the Miles-Riccati quantities, and the
even-solution expansion on [-1, 1].

The decaying solution is produced by backward integration from y_max with
asymptotic initial data sharpened by one Duhamel sweep (the error of the
plain data e^{-alpha y} is one power of the profile tail better after the
sweep).  Omega = psi/((U_s-c)[U_s' psi - (U_s-c) psi']) turns Rayleigh into
the Riccati equation Omega' = alpha^2 Y Omega^2 - 1/Y with Y = (U_s-c)^2,
whose y -> infinity limit 1/(alpha (U_+ - c)^2) anchors the dispersion
expansion of psi_-'(0)/psi_-(0) in powers of alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .local import SolutionBranch
from .numerics import quad_complex
from .profiles import ShearProfile, find_critical_points

__all__ = [
    "GlobalPair", "GlobalConstructionError", "NearEigenvalueError",
    "decaying_solution", "global_pair", "miles_omega", "omega0",
    "dispersion_ratio", "ratio_expansion", "interval_omega",
    "interval_expansion", "default_y_max",
]


class GlobalConstructionError(ValueError):
    pass


class NearEigenvalueError(RuntimeError):
    """psi_-(0) vanishes to tolerance: c is (near) an eigenvalue."""


@dataclass
class GlobalPair:
    """psi_- ~ e^{-alpha y} and psi_+ ~ e^{+alpha y} with unit Wronskian."""

    psi_minus: SolutionBranch
    psi_plus: SolutionBranch
    wronskian: complex
    y_max: float
    alpha: float
    c: complex
    meta: dict = field(default_factory=dict)


def default_y_max(p: ShearProfile, alpha: float, cap: float = 240.0) -> float:
    if p.decay_rate is None:
        raise GlobalConstructionError(
            f"profile {p.name!r} has no decay rate; half-line construction "
            "needs exponential decay data")
    return float(min(cap, 12.0 / p.decay_rate + 6.0 / abs(alpha)))


def _rayleigh_rhs(p: ShearProfile, alpha: float, c: complex):
    def rhs(y, s):
        u = complex(p.eval_deriv(y, 0)) - c
        u2 = complex(p.eval_deriv(y, 2))
        return [s[1], (alpha ** 2 + u2 / u) * s[0]]

    return rhs


def decaying_solution(p: ShearProfile, alpha: float, c: complex,
                      y_max: float | None = None, rtol: float = 1e-12,
                      atol: float = 1e-16) -> SolutionBranch:
    """psi_- on [0, y_max], normalized so psi_-(y_max) e^{alpha y_max} = 1.

    Initial data at y_max: the free solution corrected by one sweep of the
    Duhamel form psi = e^{-alpha y} - (1/alpha) int_y^inf sinh(alpha(y-z))
    V(z) psi(z) dz with V = U_s''/(U_s - c).  Backward integration toward
    y = 0 is stable for the decaying branch.
    """
    alpha = float(alpha)
    if alpha <= 0:
        raise GlobalConstructionError("decaying_solution needs alpha > 0")
    c = complex(c)
    if y_max is None:
        y_max = default_y_max(p, alpha)
    if c.imag == 0.0 and find_critical_points(p, c, window=(0.0, y_max)):
        raise GlobalConstructionError(
            "real c with a critical layer on [0, y_max]: the global real-axis "
            "integration is refused (take Im c != 0 limits in the caller)")

    decay = p.decay_rate
    z_top = y_max + 40.0 / decay

    def V(z):
        return np.asarray(p.eval_deriv(z, 2), dtype=complex) \
            / (np.asarray(p.eval_deriv(z, 0), dtype=complex) - c)

    # one Duhamel sweep at y_max with psi ~ e^{-alpha z} in the integral
    def sweep_val(z):
        return np.sinh(alpha * (y_max - z)) * V(z) * np.exp(-alpha * z)

    def sweep_der(z):
        return np.cosh(alpha * (y_max - z)) * V(z) * np.exp(-alpha * z)

    iv, _ = quad_complex(sweep_val, y_max, z_top, epsabs=1e-16, epsrel=1e-12)
    idv, _ = quad_complex(sweep_der, y_max, z_top, epsabs=1e-16, epsrel=1e-12)
    tail_bound = float(np.abs(V(z_top))) * np.exp(-alpha * z_top) / (decay + 2 * alpha)
    psi_top = np.exp(-alpha * y_max) - iv / alpha
    dpsi_top = -alpha * np.exp(-alpha * y_max) - idv

    sol = solve_ivp(_rayleigh_rhs(p, alpha, c), (y_max, 0.0),
                    np.array([psi_top, dpsi_top], dtype=complex),
                    method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise GlobalConstructionError(f"backward integration failed: {sol.message}")
    scale = np.exp(-alpha * y_max) / psi_top

    def value(y):
        return scale * sol.sol(np.asarray(y, dtype=float))[0]

    def deriv(y):
        return scale * sol.sol(np.asarray(y, dtype=float))[1]

    return SolutionBranch(
        value=value, deriv=deriv, branch="none",
        meta={"method": "half-line-decaying", "alpha": alpha, "c": c,
              "y_max": float(y_max), "tail_error_bound": tail_bound,
              "normalization": "psi(y_max) e^{alpha y_max} = 1"})


def global_pair(p: ShearProfile, alpha: float, c: complex,
                y_max: float | None = None, rtol: float = 1e-12) -> GlobalPair:
    """(psi_-, psi_+) with Wronskian normalized to 1; psi_+ is integrated
    forward from y = 0 (stable direction for the growing branch)."""
    alpha = float(alpha)
    c = complex(c)
    psi_m = decaying_solution(p, alpha, c, y_max=y_max, rtol=rtol)
    y_max = psi_m.meta["y_max"]
    pm0 = complex(psi_m.value(np.array(0.0)))
    if pm0 == 0:
        raise NearEigenvalueError("psi_-(0) = 0: c is an eigenvalue")
    sol = solve_ivp(_rayleigh_rhs(p, alpha, c), (0.0, y_max),
                    np.array([0.0, 1.0], dtype=complex), method="DOP853",
                    rtol=rtol, atol=1e-16, dense_output=True)
    if not sol.success:
        raise GlobalConstructionError(f"forward integration failed: {sol.message}")

    def value(y):
        return sol.sol(np.asarray(y, dtype=float))[0] / pm0

    def deriv(y):
        return sol.sol(np.asarray(y, dtype=float))[1] / pm0

    psi_p = SolutionBranch(value=value, deriv=deriv, branch="none",
                           meta={"method": "half-line-growing", "alpha": alpha,
                                 "c": c, "y_max": y_max})
    return GlobalPair(psi_minus=psi_m, psi_plus=psi_p, wronskian=1.0 + 0.0j,
                      y_max=y_max, alpha=alpha, c=c)


def miles_omega(branch: SolutionBranch, p: ShearProfile, c: complex, y):
    """Omega(y) = psi / ((U_s - c)[U_s' psi - (U_s - c) psi'])."""
    y = np.asarray(y, dtype=float)
    u = np.asarray(p.eval_deriv(y, 0), dtype=complex) - complex(c)
    u1 = np.asarray(p.eval_deriv(y, 1), dtype=complex)
    psi = branch.value(y)
    dpsi = branch.deriv(y)
    den = u * (u1 * psi - u * dpsi)
    if np.any(np.abs(den) < 1e-300):
        raise ZeroDivisionError("Miles denominator vanishes (pole of Omega)")
    return psi / den


def omega0(p: ShearProfile, c: complex, y: float,
           tail_tol: float = 1e-12) -> complex:
    """Omega_0(y, c) = -(U_+ - c)^{-2} int_y^inf [ (U_s-c)^2/(U_+-c)^2
    - (U_+-c)^2/(U_s-c)^2 ] dz with exponential-tail truncation.

    Real critical layers inside the range are reported, not regularized.
    """
    c = complex(c)
    if p.u_plus is None or p.decay_rate is None:
        raise GlobalConstructionError("omega0 needs half-line tail data")
    up = complex(p.u_plus)
    if c.imag == 0.0:
        cps = find_critical_points(p, c, window=(float(y), float(y) + 60.0 / p.decay_rate))
        if cps:
            raise GlobalConstructionError(
                f"real critical layer at y = {cps[0].y0:.6g} inside the "
                "integration range; Omega_0 behaves like (y - y_c)^{-1} there")
    dc = up - c

    def integrand(z):
        u = complex(p.eval_deriv(z, 0)) - c
        return (u * u) / (dc * dc) - (dc * dc) / (u * u)

    # |integrand| <= C e^{-decay z} for large z; truncate when the bound
    # clears tail_tol.
    z_hi = float(y) + 5.0 / p.decay_rate
    while True:
        samp = abs(integrand(z_hi))
        if samp < tail_tol * p.decay_rate / 4 or z_hi > y + 400.0 / p.decay_rate:
            break
        z_hi += 4.0 / p.decay_rate
    val, _ = quad_complex(integrand, float(y), z_hi, epsabs=1e-14, epsrel=1e-12)
    return -val / (dc * dc)


def dispersion_ratio(p: ShearProfile, alpha: float, c: complex,
                     y_max: float | None = None,
                     branch: SolutionBranch | None = None) -> complex:
    """psi_-'(0)/psi_-(0) from the decaying branch (invariant under branch
    rescaling)."""
    b = branch if branch is not None else decaying_solution(p, alpha, c, y_max=y_max)
    v0 = complex(b.value(np.array(0.0)))
    d0 = complex(b.deriv(np.array(0.0)))
    scale = max(abs(complex(b.value(np.array(1.0)))), abs(v0))
    if abs(v0) < 1e-12 * max(scale, 1e-300):
        raise NearEigenvalueError(f"psi_-(0) = {v0:.3e} vanishes to tolerance")
    return d0 / v0


def ratio_expansion(p: ShearProfile, alpha: float, c: complex) -> complex:
    """Dispersion-ratio expansion to O(alpha^3 / (U_s(0)-c)^2):

        psi_-'(0)/psi_-(0) = U_s'(0)/(U_s(0)-c)
            - alpha (U_+-c)^2 / (U_s(0)-c)^2
            + alpha^2 (U_+-c)^4 Omega_0(0,c) / (U_s(0)-c)^2 + ...

    obtained by inverting Omega(0) = 1/(alpha (U_+-c)^2) + Omega_0(0,c)
    + O(alpha).  For profiles with U_s(0) = 0 this is the familiar
    -U_s'(0)/c - (alpha/c^2)(U_+-c)^2 + (alpha^2/c^2)(U_+-c)^4 Omega_0
    form (the usual statement silently assumes a no-slip wall value)."""
    c = complex(c)
    if p.u_plus is None:
        raise GlobalConstructionError("ratio_expansion needs u_plus")
    up = complex(p.u_plus)
    om0 = omega0(p, c, 0.0)
    u1 = complex(p.eval_deriv(0.0, 1))
    u0c = complex(p.eval_deriv(0.0, 0)) - c
    return (u1 / u0c
            - (alpha / u0c ** 2) * (up - c) ** 2
            + (alpha ** 2 / u0c ** 2) * (up - c) ** 4 * om0)


# ---------------------------------------------------------------------------
# interval [-1, 1], even profiles


def _check_even_interval(p: ShearProfile):
    ys = np.linspace(0.0, 1.0, 11)
    if not np.allclose(np.asarray(p.eval_deriv(ys, 0)),
                       np.asarray(p.eval_deriv(-ys, 0)), rtol=0, atol=1e-12):
        raise GlobalConstructionError("interval construction needs an even profile")


def interval_omega(p: ShearProfile, alpha: float, c: complex,
                   rtol: float = 1e-12) -> complex:
    """omega(1) for the even solution: omega' = -alpha^2 Y + omega^2/Y with
    omega(0) = 0 and Y = (U_s - c)^2."""
    _check_even_interval(p)
    c = complex(c)
    if c.imag == 0.0 and find_critical_points(p, c, window=(0.0, 1.0)):
        raise GlobalConstructionError("real critical layer in [0, 1]")

    def rhs(y, s):
        u = complex(p.eval_deriv(y, 0)) - c
        Y = u * u
        return [-alpha ** 2 * Y + s[0] ** 2 / Y]

    sol = solve_ivp(rhs, (0.0, 1.0), np.array([0.0 + 0.0j]), method="DOP853",
                    rtol=rtol, atol=1e-16, dense_output=True)
    if not sol.success:
        raise GlobalConstructionError(
            f"Riccati integration failed (pole of omega?): {sol.message}")
    return complex(sol.y[0, -1])


def interval_expansion(p: ShearProfile, alpha: float, c: complex) -> complex:
    """omega(1) = -alpha^2 int_0^1 Y + alpha^4 int_0^1 omega_2^2/Y + O(alpha^6)
    with omega_2(y) = int_y^0 Y(z) dz."""
    _check_even_interval(p)
    c = complex(c)

    def Y(z):
        u = np.asarray(p.eval_deriv(z, 0), dtype=complex) - c
        return u * u

    # omega_2 by one dense integration (omega_2' = -Y, omega_2(0) = 0)
    sol = solve_ivp(lambda y, s: [-Y(float(y))], (0.0, 1.0),
                    np.array([0.0 + 0.0j]), method="DOP853",
                    rtol=1e-13, atol=1e-16, dense_output=True)
    if not sol.success:
        raise GlobalConstructionError(f"omega_2 integration failed: {sol.message}")

    i2, _ = quad_complex(lambda z: Y(z), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    i4, _ = quad_complex(lambda z: sol.sol(z)[0] ** 2 / Y(z), 0.0, 1.0,
                         epsabs=1e-14, epsrel=1e-13)
    return -alpha ** 2 * i2 + alpha ** 4 * i4
