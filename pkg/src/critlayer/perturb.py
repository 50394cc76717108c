"""Extension of the local pair to alpha != 0 by a Green-function fixed point.

With G_0 the Green kernel of d_y^2 - U_s''/(U_s - c) built from the local
pair, the iteration phi <- psi + alpha^2 G phi contracts in the
zeta-weighted sup norm once alpha^2 sigma^2 (times the measured operator
norm) is below 1, and its fixed point solves the full Rayleigh equation.

Iterates live on a fixed graded grid (refined near 0 and near +-|c|^{1/n});
the kernel applications reduce to cumulative spline integrals, so each sweep
is O(grid size).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .local import SolutionBranch, ZetaWeight, local_pair_alpha0, wronskian
from .numerics import cubic_spline_complex, graded_grid, quad_complex
from .profiles import CriticalPoint, ShearProfile

__all__ = [
    "LocalGreen", "local_green", "green_zero", "apply_green", "zeta_norm",
    "fixed_point_solution", "ContractionError",
]


class ContractionError(RuntimeError):
    """alpha^2 sigma^2 too large for the fixed point to contract."""


@dataclass
class LocalGreen:
    """Local Green kernel data: the alpha = 0 pair, its (constant) Wronskian
    and the interval half-width sigma."""

    psi1: SolutionBranch
    psi2: SolutionBranch
    wronskian: complex
    sigma: float
    zeta: ZetaWeight
    grid: np.ndarray
    c: complex
    order: int
    meta: dict = field(default_factory=dict)


def local_green(p: ShearProfile, cp: CriticalPoint, c: complex,
                sigma: float = 0.2, N: int = 6, grid_n: int = 160) -> LocalGreen:
    """Build the kernel from the local pair; checks Wronskian constancy."""
    radius = sigma * 1.05 + 0.0
    psi1, psi2 = local_pair_alpha0(p, cp, c, N=N, radius=max(radius, sigma * 1.02))
    rad = psi1.meta["radius"]
    if rad < sigma:
        raise ValueError(f"sigma={sigma} exceeds the local validity radius {rad:.3g}")
    n = cp.order
    ctld = (complex(c) - cp.c0) / psi1.meta["tilde_scale"]
    eps = abs(ctld) ** (1.0 / n)
    grid = graded_grid(cp.y0 - sigma, cp.y0 + sigma,
                       special=(cp.y0, cp.y0 + eps, cp.y0 - eps),
                       n_base=grid_n, min_spacing=max(eps * 1e-3, 1e-9))
    probe = cp.y0 + sigma * np.array([-0.9, -0.4, 0.05, 0.5, 0.95])
    w = wronskian(psi1, psi2, probe)
    w0 = complex(np.mean(w))
    dev = float(np.max(np.abs(w - w0)) / abs(w0))
    if dev > 1e-8:
        raise RuntimeError(f"Wronskian not constant (rel dev {dev:.2e})")
    return LocalGreen(psi1=psi1, psi2=psi2, wronskian=w0, sigma=float(sigma),
                      zeta=ZetaWeight(n=n, c_abs=abs(ctld)), grid=grid, c=complex(c),
                      order=n, meta={"wronskian_dev": dev, "critical_point": cp})


def green_zero(g: LocalGreen, x: float, y: float) -> complex:
    """G_0(x, y) = psi1(min) psi2(max) / W; symmetric, continuous at x = y,
    with unit jump of d_y G_0 across y = x."""
    lo, hi = (x, y) if x <= y else (y, x)
    return complex(g.psi1.value(np.asarray(lo)) * g.psi2.value(np.asarray(hi))
                   / g.wronskian)


def apply_green(g: LocalGreen, f, epsabs: float = 1e-10, epsrel: float = 1e-8):
    """(G f)(y) = int_{-sigma}^{sigma} G_0(x, y) f(x) dx by adaptive
    quadrature split at x = y.  Returns a callable."""
    y0 = g.meta["critical_point"].y0
    a, b = y0 - g.sigma, y0 + g.sigma

    def gf(y):
        y = float(y)
        left, _ = quad_complex(lambda x: complex(g.psi1.value(np.asarray(x))) * f(x),
                               a, y, epsabs=epsabs, epsrel=epsrel)
        right, _ = quad_complex(lambda x: complex(g.psi2.value(np.asarray(x))) * f(x),
                                y, b, epsabs=epsabs, epsrel=epsrel)
        return (complex(g.psi2.value(np.asarray(y))) * left
                + complex(g.psi1.value(np.asarray(y))) * right) / g.wronskian

    return gf


def zeta_norm(f, sigma: float, zw: ZetaWeight, grid=None, center: float = 0.0) -> float:
    """sup over the grid of |f(x)| / zeta(x - center, c)."""
    if grid is None:
        grid = graded_grid(center - sigma, center + sigma, special=(center,),
                           n_base=160, min_spacing=1e-8)
    grid = np.asarray(grid, dtype=float)
    vals = f(grid) if callable(f) else np.asarray(f, dtype=complex)
    return float(np.max(np.abs(vals) / zw(grid - center)))


def _sweep(g: LocalGreen, psi1_g, psi2_g, phi_g):
    """One application of G to grid values phi_g; returns (values, A-spline,
    B-spline, B_total) for evaluator reuse."""
    a_sp = cubic_spline_complex(g.grid, psi1_g * phi_g).antiderivative()
    b_sp = cubic_spline_complex(g.grid, psi2_g * phi_g).antiderivative()
    A = a_sp(g.grid) - a_sp(g.grid[0])
    B = b_sp(g.grid) - b_sp(g.grid[0])
    Btot = B[-1]
    vals = (psi2_g * A + psi1_g * (Btot - B)) / g.wronskian
    return vals, a_sp, b_sp, Btot


def fixed_point_solution(g: LocalGreen, seed: SolutionBranch, alpha: float,
                         tol: float = 1e-10, max_iter: int = 60) -> SolutionBranch:
    """Fixed point of phi = seed + alpha^2 G phi; solves the full Rayleigh
    equation and preserves the zeta bound of the seed.

    Raises ContractionError when the measured contraction factor (from the
    operator norm probe or the running increments) reaches 1."""
    alpha = float(alpha)
    y0 = g.meta["critical_point"].y0
    grid = g.grid
    psi1_g = np.asarray(g.psi1.value(grid), dtype=complex)
    psi2_g = np.asarray(g.psi2.value(grid), dtype=complex)
    seed_g = np.asarray(seed.value(grid), dtype=complex)

    zw = g.zeta
    zvals = zw(grid - y0)
    gz, *_ = _sweep(g, psi1_g, psi2_g, zvals.astype(complex))
    norm_G = float(np.max(np.abs(gz) / zvals))
    factor = alpha ** 2 * norm_G
    if alpha != 0.0 and factor >= 0.95:
        raise ContractionError(
            f"alpha^2 * ||G||_zeta = {factor:.3g} >= 0.95: no contraction "
            f"(alpha={alpha}, sigma={g.sigma})")

    phi = seed_g.copy()
    increments = []
    a_sp = b_sp = None
    Btot = 0.0 + 0.0j
    if alpha == 0.0:
        phi_new, a_sp, b_sp, Btot = phi, *_sweep(g, psi1_g, psi2_g, phi)[1:]
        iterations = 0
    else:
        iterations = 0
        for it in range(1, max_iter + 1):
            gphi, a_sp, b_sp, Btot = _sweep(g, psi1_g, psi2_g, phi)
            phi_new = seed_g + alpha ** 2 * gphi
            inc = float(np.max(np.abs(phi_new - phi) / zvals))
            increments.append(inc)
            scale = float(np.max(np.abs(phi_new) / zvals))
            phi = phi_new
            iterations = it
            if inc <= tol * max(1.0, scale):
                break
            if len(increments) >= 3 and increments[-1] > increments[-2] > increments[-3]:
                raise ContractionError(
                    f"increments grow ({increments[-3:]}); measured factor "
                    f"{increments[-1]/increments[-2]:.3g}")
        else:
            raise ContractionError(
                f"no convergence in {max_iter} iterations; last increment {inc:.3g}")

    a_spf, b_spf = a_sp, b_sp
    x_lo = grid[0]
    alpha2 = alpha ** 2
    W = g.wronskian
    p1v, p1d = g.psi1.value, g.psi1.deriv
    p2v, p2d = g.psi2.value, g.psi2.deriv

    def value(y):
        y = np.asarray(y, dtype=float)
        A = a_spf(y) - a_spf(x_lo)
        B = b_spf(y) - b_spf(x_lo)
        return seed.value(y) + alpha2 * (p2v(y) * A + p1v(y) * (Btot - B)) / W

    def deriv(y):
        y = np.asarray(y, dtype=float)
        A = a_spf(y) - a_spf(x_lo)
        B = b_spf(y) - b_spf(x_lo)
        return seed.deriv(y) + alpha2 * (p2d(y) * A + p1d(y) * (Btot - B)) / W

    meta = dict(seed.meta)
    meta.update({
        "alpha": alpha, "method": "green-fixed-point", "sigma": g.sigma,
        "iterations": iterations, "increments": increments,
        "operator_norm": norm_G, "contraction_factor": factor,
        "validity_grid": grid,
    })
    return SolutionBranch(value=value, deriv=deriv, branch=seed.branch, meta=meta)
