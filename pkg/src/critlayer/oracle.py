"""Independent ground truth: contour ODE integration, direct quadrature,
and residual measurement.

Everything here goes through generic machinery (embedded explicit
Runge-Kutta with complex state, QUADPACK) so it shares no code path with
the analytic constructions it checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .numerics import quad_complex
from .profiles import ShearProfile

__all__ = [
    "ContourSolution", "ContourError", "integrate_contour", "default_contour",
    "quadrature", "rayleigh_residual", "fundamental_system",
]


class ContourError(RuntimeError):
    pass


@dataclass
class ContourSolution:
    """Solution data along a polyline in the complex y plane."""

    vertices: list
    values: np.ndarray        # psi at the vertices
    derivs: np.ndarray        # psi' at the vertices
    error_estimate: float
    segments: list = field(default_factory=list)  # (y_a, y_b, dense sol)

    def at(self, y):
        """Evaluate on points lying on one of the polyline segments."""
        y = complex(y)
        for (a, b, sol) in self.segments:
            d = b - a
            s = ((y - a) / d).real if d != 0 else 0.0
            off = abs(y - (a + s * d))
            if -1e-12 <= s <= 1 + 1e-12 and off <= 1e-10 * max(1.0, abs(d)):
                out = sol.sol(min(max(s, 0.0), 1.0))
                return out[0], out[1] / d
        raise ContourError(f"point {y} does not lie on the contour")


def integrate_contour(p: ShearProfile, alpha: float, c: complex, path,
                      init, rtol: float = 1e-11, atol: float = 1e-13,
                      clearance: float | None = None) -> ContourSolution:
    """Integrate psi'' = (alpha^2 + U_s''/(U_s - c)) psi along a polyline of
    complex vertices with initial (value, derivative) at path[0].

    The profile must be analytic (complex-evaluable).  The path must keep
    the stated clearance from the zeros of U_s - c; the error estimate is
    the difference against a second pass at 100x tighter tolerance.
    """
    if not p.analytic:
        raise ContourError(f"profile {p.name!r} is not complex-evaluable")
    path = [complex(v) for v in path]
    if len(path) < 2:
        raise ContourError("path needs at least two vertices")
    c = complex(c)
    if clearance is None:
        clearance = 1e-4
    for a, b in zip(path[:-1], path[1:]):
        s = np.linspace(0.0, 1.0, 64)
        ys = a + s * (b - a)
        gap = np.min(np.abs(np.asarray(p.eval_deriv(ys, 0)) - c))
        if gap < clearance:
            raise ContourError(
                f"segment {a} -> {b} approaches a zero of U_s - c to "
                f"{gap:.3e} < clearance {clearance:.3e}")

    def run(rt, at):
        vals = [complex(init[0])]
        ders = [complex(init[1])]
        segs = []
        state = np.array([init[0], init[1]], dtype=complex)
        for a, b in zip(path[:-1], path[1:]):
            d = b - a

            def rhs(s, q, a=a, d=d):
                y = a + s * d
                u = complex(p.eval_deriv(y, 0)) - c
                u2 = complex(p.eval_deriv(y, 2))
                return [d * q[1], d * (alpha ** 2 + u2 / u) * q[0]]

            seg_state = np.array([state[0], state[1] * d], dtype=complex)
            sol = solve_ivp(rhs, (0.0, 1.0), np.array([state[0], state[1] * d]),
                            method="DOP853", rtol=rt, atol=at, dense_output=True)
            if not sol.success:
                raise ContourError(f"integration failed on {a} -> {b}: "
                                   f"{sol.message}")
            state = np.array([sol.y[0, -1], sol.y[1, -1] / d], dtype=complex)
            vals.append(state[0])
            ders.append(state[1])
            segs.append((a, b, sol))
        return np.array(vals), np.array(ders), segs

    v1, d1, segs = run(rtol, atol)
    v2, d2, _ = run(rtol * 1e-2, atol * 1e-2)
    scale = float(np.max(np.abs(v2))) or 1.0
    err = float(np.max(np.abs(v1 - v2)) / scale)
    return ContourSolution(vertices=path, values=v2, derivs=d2,
                           error_estimate=err, segments=segs)


def _near_axis_roots(p: ShearProfile, c: complex, window, n_scan: int = 2001):
    """Complex zeros of U_s - c whose real part lies in the window, found by
    Newton from the real-axis minima of |U_s - c|."""
    a, b = window
    ys = np.linspace(a, b, n_scan)
    vals = np.abs(np.asarray(p.eval_deriv(ys, 0)) - c)
    idx = [i for i in range(1, n_scan - 1)
           if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]]
    roots = []
    for i in idx:
        z = complex(ys[i])
        for _ in range(80):
            f = complex(p.eval_deriv(z, 0)) - c
            fp = complex(p.eval_deriv(z, 1))
            if fp == 0:
                break
            step = f / fp
            z = z - step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        if abs(complex(p.eval_deriv(z, 0)) - c) < 1e-10 and a - 0.2 <= z.real <= b + 0.2:
            if all(abs(z - r) > 1e-8 for r in roots):
                roots.append(z)
    return roots


def default_contour(p: ShearProfile, c: complex, y_from: float, y_to: float,
                    order_hint: int = 1, radius: float | None = None,
                    arc_points: int = 10):
    """Polyline from y_from to y_to with semicircular detours (polyline
    approximations) around every near-axis zero of U_s - c, each detour on
    the opposite side from the zero (homotopic to the real path)."""
    lo, hi = min(y_from, y_to), max(y_from, y_to)
    roots = [r for r in _near_axis_roots(p, c, (lo, hi))
             if abs(r.imag) < 0.3]
    if radius is None:
        radius = max(2.0 * abs(c) ** (1.0 / max(order_hint, 1)), 1e-2)
    roots.sort(key=lambda r: r.real)
    sign = 1.0 if y_to > y_from else -1.0
    verts = [complex(y_from)]
    for r in (roots if sign > 0 else reversed(roots)):
        side = -np.sign(r.imag) if r.imag != 0 else -np.sign(c.imag) or -1.0
        x0 = r.real
        start, end = x0 - sign * radius, x0 + sign * radius
        if (start - verts[-1].real) * sign > 0:
            verts.append(complex(start))
        ts = np.linspace(0.0, np.pi, arc_points + 1)[1:]
        for t in ts:
            verts.append(complex(x0 - sign * radius * np.cos(t)
                                 + 1j * side * radius * np.sin(t)))
    if (complex(y_to).real - verts[-1].real) * sign > 0 or len(verts) == 1:
        verts.append(complex(y_to))
    return verts


def fundamental_system(p: ShearProfile, alpha: float, c: complex,
                       y_start: float, path, rtol: float = 1e-11):
    """Two contour solutions with data (1, 0) and (0, 1) at y_start; any
    solution is matched as psi(y_start) * phi_a + psi'(y_start) * phi_b."""
    if abs(complex(path[0]) - y_start) > 1e-12:
        raise ContourError("path must start at y_start")
    sa = integrate_contour(p, alpha, c, path, (1.0, 0.0), rtol=rtol)
    sb = integrate_contour(p, alpha, c, path, (0.0, 1.0), rtol=rtol)
    return sa, sb


def quadrature(f, a, b, tol: float = 1e-10):
    """Adaptive quadrature of a (complex) integrand; returns (value,
    error_estimate)."""
    return quad_complex(f, a, b, epsabs=tol * 1e-2, epsrel=tol)


def rayleigh_residual(branch, p: ShearProfile, alpha: float, c: complex,
                      grid, h_rel: float = 3e-3, use_deriv: bool = True) -> float:
    """max normalized residual |psi'' - (alpha^2 + U_s''/(U_s-c)) psi| /
    max(|psi''|, |coef psi|) over the grid, with psi'' from 4th-order
    differencing of the branch derivative (or of the value when
    use_deriv=False).  The step adapts to the local scale |c|^{1/n} + |y -
    y_near| of the branch."""
    grid = np.asarray(grid, dtype=float)
    c = complex(c)
    out = 0.0
    w1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
    w2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    off = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    meta = getattr(branch, "meta", {})
    cp = meta.get("critical_point")
    if cp is not None:
        epsc = abs(c - cp.c0) ** (1.0 / cp.order)
        scale_fn = lambda y: epsc + abs(y - cp.y0)
    else:
        scale_fn = lambda y: max(1.0, abs(y))
    for y in grid:
        h = h_rel * scale_fn(y)
        ys = y + off * h
        if use_deriv:
            d = np.asarray(branch.deriv(ys), dtype=complex)
            psi2 = np.dot(w1, d) / h
        else:
            v = np.asarray(branch.value(ys), dtype=complex)
            psi2 = np.dot(w2, v) / (h * h)
        psi = complex(np.asarray(branch.value(np.array(y)), dtype=complex))
        u = complex(p.eval_deriv(y, 0)) - c
        coef = alpha ** 2 + complex(p.eval_deriv(y, 2)) / u
        num = abs(psi2 - coef * psi)
        den = max(abs(psi2), abs(coef * psi), 1e-300)
        out = max(out, num / den)
    return float(out)
