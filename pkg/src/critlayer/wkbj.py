"""WKBJ branches, validity classification, and the matched uniform solution.

K(y) = alpha^2 + U_s''/(U_s - c).  Where |K'| << |K|^{3/2} the decaying /
growing exponential branches K(y0)^{1/4} K(y)^{-1/4} exp(+-int sqrt K) are
accurate to O(1/alpha).  Near the critical zone they are matched through:

* small alpha |c|^{1/n}:  WKBJ down to y1 = |c|^{1/n} + sigma1/alpha,
  ODE transport (rescaled variable z = alpha y) down to y0 = sigma0/alpha,
  then a combination a psi1 + b psi2 of the local pair across [-y0, y0],
  mirrored on the left;
* middle:  WKBJ outside +-y1, transport straight across (the two simple
  quasi-singularities are off the real axis for Im c != 0);
* large:  WKBJ down to |y -+ ybar| >= sigma1 |c|^{1/n} x^{-3/2} and an
  order-1 local pair (alpha-corrected by the fixed point) within
  |y -+ ybar| <= sigma0/alpha around each real point ybar with
  U_s(ybar) = +-|c|; the two regions overlap only when
  alpha |c|^{1/n} >= (sigma1/sigma0)^2.

Matching abscissas are clamped to the construction radius vartheta, so for
small alpha the chain degenerates gracefully to the local pair seeded with
WKBJ data at vartheta (the asymptotic chain is active for large alpha,
which is where uniformity matters).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .local import Order1System, SolutionBranch, local_pair_alpha0
from .numerics import cubic_spline_complex, graded_grid
from .perturb import fixed_point_solution, local_green
from .profiles import CriticalPoint, ShearProfile

__all__ = [
    "Thresholds", "Regime", "PhaseData", "WkbjValidityError", "OverlapError",
    "wkbj_condition", "wkbj_branch", "classify_regime", "matched_minus",
]


class WkbjValidityError(RuntimeError):
    pass


class OverlapError(RuntimeError):
    """Matching regions do not overlap for the chosen thresholds."""


@dataclass(frozen=True)
class Thresholds:
    """Regime/matching constants (the proposition only requires them small
    or large enough; these defaults are engineering choices)."""

    rho: float = 0.1          # WKBJ validity: |K'|/|K|^{3/2} <= rho
    sigma0: float = 0.5       # local interval half-width in z = alpha y
    sigma1: float = 10.0      # WKBJ inner clearance in z = alpha y
    sigma_small: float = 0.1  # small-regime bound on alpha |c|^{1/n}
    sigma_large: float = 10.0 # large-regime bound on alpha |c|^{1/n}
    vartheta: float = 0.3     # construction radius


@dataclass(frozen=True)
class Regime:
    tag: str                  # "small" | "middle" | "large"
    x: float                  # alpha |c - c0|^{1/n}
    thresholds: Thresholds
    y0: float                 # sigma0 / |alpha|
    y1: float                 # |c|^{1/n} + sigma1 / |alpha|


def _K_parts(p: ShearProfile, c: complex, alpha: float, y):
    y = np.asarray(y, dtype=float)
    u = np.asarray(p.eval_deriv(y, 0), dtype=complex) - c
    u2 = np.asarray(p.eval_deriv(y, 2), dtype=complex)
    return alpha ** 2 + u2 / u, u, u2


def wkbj_condition(p: ShearProfile, c: complex, alpha: float, y):
    """|K'(y)| / |K(y)|^{3/2}; compare against Thresholds.rho.  Returns inf
    at a zero of K (turning point)."""
    y = np.asarray(y, dtype=float)
    K, u, u2 = _K_parts(p, c, alpha, y)
    u1 = np.asarray(p.eval_deriv(y, 1), dtype=complex)
    u3 = np.asarray(p.eval_deriv(y, 3), dtype=complex)
    Kp = (u3 * u - u2 * u1) / u ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(K == 0, np.inf, np.abs(Kp) / np.abs(K) ** 1.5)
    return out if out.shape else out[()]


class PhaseData:
    """Continuous sqrt(K), K^{1/4} and the cumulative phase integral on a
    range, with branch continuity enforced by argument unwrapping along the
    path (adjacent-point jumps < pi/2 are asserted)."""

    def __init__(self, p: ShearProfile, c: complex, alpha: float,
                 a: float, b: float, n_grid: int = 1600):
        if not b > a:
            raise ValueError("PhaseData needs b > a")
        self.p, self.c, self.alpha = p, complex(c), float(alpha)
        ys = graded_grid(a, b, special=(a, b), n_base=n_grid,
                         min_spacing=(b - a) * 1e-7, span_factor=0.5)
        K, u, u2 = _K_parts(p, c, alpha, ys)
        arg = np.unwrap(np.angle(K))
        jumps = np.abs(np.diff(arg))
        if np.any(jumps > np.pi / 2):
            raise WkbjValidityError(
                f"sqrt(K) branch continuity violated: max adjacent argument "
                f"jump {np.max(jumps):.3f} > pi/2; refine the grid")
        self._logK = cubic_spline_complex(ys, np.log(np.abs(K)) + 1j * arg)
        sqrtK = np.exp(0.5 * (np.log(np.abs(K)) + 1j * arg))
        self._sqrtK = cubic_spline_complex(ys, sqrtK)
        self._phase = self._sqrtK.antiderivative()
        self.grid = ys
        self.max_condition = float(np.max(wkbj_condition(p, c, alpha, ys)))

    def K(self, y):
        return np.exp(self._logK(np.asarray(y, dtype=float)))

    def sqrtK(self, y):
        return np.exp(0.5 * self._logK(np.asarray(y, dtype=float)))

    def quartK(self, y):
        return np.exp(0.25 * self._logK(np.asarray(y, dtype=float)))

    def phase_integral(self, y0, y):
        """int_{y0}^{y} sqrt(K(z)) dz along the real path."""
        return self._phase(np.asarray(y, dtype=float)) - self._phase(float(y0))

    def K_prime(self, y):
        y = np.asarray(y, dtype=float)
        u = np.asarray(self.p.eval_deriv(y, 0), dtype=complex) - self.c
        u1 = np.asarray(self.p.eval_deriv(y, 1), dtype=complex)
        u2 = np.asarray(self.p.eval_deriv(y, 2), dtype=complex)
        u3 = np.asarray(self.p.eval_deriv(y, 3), dtype=complex)
        return (u3 * u - u2 * u1) / u ** 2


def wkbj_branch(p: ShearProfile, c: complex, alpha: float, y0: float,
                sign: int, y_range=None, thresholds: Thresholds | None = None,
                n_grid: int = 1600) -> SolutionBranch:
    """Leading-order WKBJ branch normalized to 1 at y0:
    (K(y0)/K(y))^{1/4} exp(sign * int_{y0}^{y} sqrt K).

    The validity condition |K'| <= rho |K|^{3/2} is enforced on the whole
    range."""
    th = thresholds or Thresholds()
    if y_range is None:
        raise ValueError("wkbj_branch needs an explicit (a, b) range")
    a, b = float(y_range[0]), float(y_range[1])
    if not (a <= y0 <= b):
        raise ValueError("anchor y0 must lie inside the range")
    ph = PhaseData(p, c, alpha, a, b, n_grid=n_grid)
    if ph.max_condition > th.rho:
        raise WkbjValidityError(
            f"WKBJ condition sup |K'|/|K|^{{3/2}} = {ph.max_condition:.3g} "
            f"exceeds rho = {th.rho} on [{a}, {b}]")
    sgn = 1.0 if sign > 0 else -1.0
    q0 = ph.quartK(y0)

    def value(y):
        y = np.asarray(y, dtype=float)
        return q0 / ph.quartK(y) * np.exp(sgn * ph.phase_integral(y0, y))

    def deriv(y):
        y = np.asarray(y, dtype=float)
        return (sgn * ph.sqrtK(y) - ph.K_prime(y) / (4.0 * ph.K(y))) * value(y)

    return SolutionBranch(
        value=value, deriv=deriv, branch="none",
        meta={"method": "wkbj", "alpha": float(alpha), "c": complex(c),
              "sign": int(sign), "anchor": float(y0), "range": (a, b),
              "max_condition": ph.max_condition, "phase_data": ph})


def classify_regime(alpha: float, c: complex, n: int,
                    thresholds: Thresholds | None = None,
                    c0: float = 0.0) -> Regime:
    """Regime tag in alpha |c - c0|^{1/n}, plus the small-regime matching
    abscissas y0 = sigma0/|alpha| and y1 = |c|^{1/n} + sigma1/|alpha|."""
    th = thresholds or Thresholds()
    aa = abs(float(alpha))
    eps = abs(complex(c) - c0) ** (1.0 / n)
    x = aa * eps
    if x <= th.sigma_small:
        tag = "small"
    elif x >= th.sigma_large:
        tag = "large"
    else:
        tag = "middle"
    y0 = th.sigma0 / aa if aa > 0 else np.inf
    y1 = eps + (th.sigma1 / aa if aa > 0 else np.inf)
    return Regime(tag=tag, x=x, thresholds=th, y0=y0, y1=y1)


# ---------------------------------------------------------------------------
# matched construction


@dataclass
class _Piece:
    lo: float
    hi: float
    value: object
    deriv: object
    scale_log: complex = 0.0 + 0.0j

    def val(self, y):
        return np.asarray(self.value(y), dtype=complex) * np.exp(self.scale_log)

    def der(self, y):
        return np.asarray(self.deriv(y), dtype=complex) * np.exp(self.scale_log)


def _transport(p: ShearProfile, c: complex, alpha: float, y_from: float,
               y_to: float, v: complex, d: complex, rtol=1e-11, atol=1e-14):
    """Integrate the Rayleigh equation from y_from to y_to with data (v, d).

    Carried out in the rescaled variable z = |alpha| y (bounded coefficients
    1 + U''/(alpha^2 (U - c))) when alpha != 0."""
    aa = abs(float(alpha))
    if aa == 0.0:
        def rhs(y, s):
            u = complex(p.eval_deriv(y, 0)) - c
            u2 = complex(p.eval_deriv(y, 2))
            return [s[1], (u2 / u) * s[0]]
        sol = solve_ivp(rhs, (y_from, y_to), np.array([v, d], dtype=complex),
                        method="DOP853", rtol=rtol, atol=atol, dense_output=True)
        if not sol.success:
            raise RuntimeError(f"transport failed: {sol.message}")
        return (lambda y: sol.sol(np.asarray(y, dtype=float))[0],
                lambda y: sol.sol(np.asarray(y, dtype=float))[1])

    def rhs_z(z, s):
        y = z / aa
        u = complex(p.eval_deriv(y, 0)) - c
        u2 = complex(p.eval_deriv(y, 2))
        return [s[1], (1.0 + u2 / (aa ** 2 * u)) * s[0]]

    z0, z1 = aa * y_from, aa * y_to
    sol = solve_ivp(rhs_z, (z0, z1), np.array([v, d / aa], dtype=complex),
                    method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise RuntimeError(f"transport failed: {sol.message}")

    def value(y):
        return sol.sol(aa * np.asarray(y, dtype=float))[0]

    def deriv(y):
        return aa * sol.sol(aa * np.asarray(y, dtype=float))[1]

    return value, deriv


def _solve_combo(b1: SolutionBranch, b2: SolutionBranch, y: float,
                 v: complex, d: complex):
    """(a, b) with a b1 + b b2 matching value v and derivative d at y."""
    ya = np.asarray(y, dtype=float)
    p1, p2 = complex(b1.value(ya)), complex(b2.value(ya))
    d1, d2 = complex(b1.deriv(ya)), complex(b2.deriv(ya))
    W = p1 * d2 - d1 * p2
    if W == 0:
        raise RuntimeError("degenerate local pair at the matching point")
    return (d2 * v - p2 * d) / W, (p1 * d - d1 * v) / W


def _normalized(v: complex, d: complex, alpha: float):
    """Rescale matching data to O(1), returning (v, d, log of scale)."""
    m = max(abs(v), abs(d) / max(abs(alpha), 1.0))
    if m == 0:
        raise RuntimeError("vanishing matching data")
    return v / m, d / m, np.log(m)


def _local_simple_pair(p: ShearProfile, c: complex, alpha: float,
                       center: float, half_width: float):
    """alpha-corrected order-1 pair around a simple quasi-singular point
    (large-regime inner construction)."""
    sys1 = Order1System(p, center, c, radius=half_width * 1.3,
                        anchor=half_width * 0.65)
    b1, b2 = sys1.pair()
    if alpha == 0.0:
        return b1, b2
    from .perturb import LocalGreen
    from .local import ZetaWeight, wronskian as _wr
    grid = graded_grid(center - half_width, center + half_width,
                       special=(center, center + float(np.real(sys1.ctld))),
                       n_base=120, min_spacing=max(abs(sys1.ctld) * 1e-3, 1e-10))
    w0 = complex(_wr(b1, b2, np.array(center + 0.3 * half_width)))
    g = LocalGreen(psi1=b1, psi2=b2, wronskian=w0, sigma=half_width,
                   zeta=ZetaWeight(n=1, c_abs=abs(sys1.ctld)), grid=grid,
                   c=complex(c), order=1,
                   meta={"critical_point": sys1.cp})
    f1 = fixed_point_solution(g, b1, alpha)
    f2 = fixed_point_solution(g, b2, alpha)
    return f1, f2


def matched_minus(p: ShearProfile, cp: CriticalPoint, c: complex, alpha: float,
                  thresholds: Thresholds | None = None, N: int = 6,
                  n_grid: int = 1200) -> SolutionBranch:
    """The uniformly-valid decaying solution psi_- on [-vartheta, vartheta],
    assembled per regime and normalized to 1 at the right inner matching
    point.  Value and derivative are continuous at every junction by
    construction."""
    th = thresholds or Thresholds()
    reg = classify_regime(alpha, c, cp.order, th, c0=cp.c0)
    aa = abs(float(alpha))
    vt = th.vartheta
    y0c = cp.y0
    eps = abs(complex(c) - cp.c0) ** (1.0 / cp.order)

    pieces: list[_Piece] = []

    y1_eff = min(reg.y1, vt)
    have_wkb_right = reg.y1 < vt * 0.999

    # right WKBJ piece (or a WKBJ-seeded point at vartheta)
    if have_wkb_right:
        wr = wkbj_branch(p, c, alpha, y0=y0c + y1_eff, sign=-1,
                         y_range=(y0c + y1_eff, y0c + vt), thresholds=th,
                         n_grid=n_grid)
        pieces.append(_Piece(y0c + y1_eff, y0c + vt, wr.value, wr.deriv))
        v, d = 1.0 + 0.0j, complex(wr.deriv(np.array(y0c + y1_eff)))
        scale = 0.0 + 0.0j
    else:
        ph = PhaseData(p, c, alpha, y0c + vt * 0.5, y0c + vt, n_grid=400)
        v = 1.0 + 0.0j
        d = complex(-ph.sqrtK(y0c + vt) - ph.K_prime(y0c + vt)
                    / (4.0 * ph.K(y0c + vt)))
        scale = 0.0 + 0.0j
        y1_eff = vt

    if reg.tag == "large":
        pieces_l, v, d, scale = _assemble_large(
            p, cp, c, alpha, th, reg, v, d, scale, y1_eff, n_grid)
        pieces.extend(pieces_l)
    elif reg.tag == "middle" or (reg.tag == "small" and reg.y0 >= y1_eff * 0.999):
        # transport straight across the critical zone
        vv, dd, lg = _normalized(v, d, aa)
        val, der = _transport(p, c, alpha, y0c + y1_eff, y0c - y1_eff, vv, dd)
        pc = _Piece(y0c - y1_eff, y0c + y1_eff, val, der, scale + lg)
        pieces.append(pc)
        v, d = complex(pc.val(np.array(y0c - y1_eff))), complex(pc.der(np.array(y0c - y1_eff)))
        scale = 0.0 + 0.0j
        y1_left = y1_eff
    else:
        # small regime chain: transport, local combo, transport
        y0_eff = min(reg.y0, y1_eff)
        if y1_eff > y0_eff * 1.0001:
            vv, dd, lg = _normalized(v, d, aa)
            val, der = _transport(p, c, alpha, y0c + y1_eff, y0c + y0_eff, vv, dd)
            pc = _Piece(y0c + y0_eff, y0c + y1_eff, val, der, scale + lg)
            pieces.append(pc)
            v = complex(pc.val(np.array(y0c + y0_eff)))
            d = complex(pc.der(np.array(y0c + y0_eff)))
            scale = 0.0 + 0.0j
        # local pair on [-y0_eff, y0_eff]
        sigma_loc = y0_eff
        g = local_green(p, cp, c, sigma=sigma_loc, N=N)
        if aa > 0:
            b1 = fixed_point_solution(g, g.psi1, aa)
            b2 = fixed_point_solution(g, g.psi2, aa)
        else:
            b1, b2 = g.psi1, g.psi2
        vv, dd, lg2 = _normalized(v, d, aa)
        a_co, b_co = _solve_combo(b1, b2, y0c + y0_eff, vv, dd)

        def mid_val(y, a_co=a_co, b_co=b_co, b1=b1, b2=b2):
            return a_co * b1.value(y) + b_co * b2.value(y)

        def mid_der(y, a_co=a_co, b_co=b_co, b1=b1, b2=b2):
            return a_co * b1.deriv(y) + b_co * b2.deriv(y)

        pc = _Piece(y0c - y0_eff, y0c + y0_eff, mid_val, mid_der, scale + lg2)
        pieces.append(pc)
        v = complex(pc.val(np.array(y0c - y0_eff)))
        d = complex(pc.der(np.array(y0c - y0_eff)))
        scale = 0.0 + 0.0j
        if y1_eff > y0_eff * 1.0001:
            vv, dd, lg3 = _normalized(v, d, aa)
            val, der = _transport(p, c, alpha, y0c - y0_eff, y0c - y1_eff, vv, dd)
            pc = _Piece(y0c - y1_eff, y0c - y0_eff, val, der, scale + lg3)
            pieces.append(pc)
            v = complex(pc.val(np.array(y0c - y1_eff)))
            d = complex(pc.der(np.array(y0c - y1_eff)))
            scale = 0.0 + 0.0j
        y1_left = y1_eff

    if reg.tag != "large":
        # left WKBJ combination on [-vartheta, -y1]
        if y1_left < vt * 0.999:
            bp = wkbj_branch(p, c, alpha, y0=y0c - y1_left, sign=+1,
                             y_range=(y0c - vt, y0c - y1_left), thresholds=th,
                             n_grid=n_grid)
            bm = wkbj_branch(p, c, alpha, y0=y0c - y1_left, sign=-1,
                             y_range=(y0c - vt, y0c - y1_left), thresholds=th,
                             n_grid=n_grid)
            vv, dd, lg4 = _normalized(v, d, aa)
            cp_, cm_ = _solve_combo(bp, bm, y0c - y1_left, vv, dd)

            def left_val(y, cp_=cp_, cm_=cm_, bp=bp, bm=bm):
                return cp_ * bp.value(y) + cm_ * bm.value(y)

            def left_der(y, cp_=cp_, cm_=cm_, bp=bp, bm=bm):
                return cp_ * bp.deriv(y) + cm_ * bm.deriv(y)

            pieces.append(_Piece(y0c - vt, y0c - y1_left, left_val, left_der,
                                 scale + lg4))

    pieces.sort(key=lambda q: q.lo)
    return _piecewise_branch(pieces, reg, c, alpha, cp)


def _quasi_singular_point(p: ShearProfile, cp: CriticalPoint, c: complex,
                          side: int, vartheta: float) -> float:
    """The real point on the given side of y0 where U_s - c0 reaches the
    modulus-matched level (t = +-1 in the rescaled variable)."""
    import math as _math

    from scipy.optimize import brentq as _brentq

    n = cp.order
    a_n = float(np.real(p.eval_deriv(cp.y0, n))) / _math.factorial(n)
    level = cp.c0 + (side ** n) * np.sign(a_n) * abs(complex(c) - cp.c0)
    lo, hi = (cp.y0, cp.y0 + vartheta) if side > 0 else (cp.y0 - vartheta, cp.y0)

    def f(y):
        return float(np.real(p.eval_deriv(y, 0))) - level

    return float(_brentq(f, lo, hi, xtol=1e-15))


def _assemble_large(p, cp, c, alpha, th, reg, v, d, scale, y1_eff, n_grid):
    """Large-regime chain: WKBJ / order-1 local / WKBJ (/ order-1 / WKBJ)."""
    aa = abs(float(alpha))
    x = reg.x
    need = (th.sigma1 / th.sigma0) ** 2
    if x < need:
        raise OverlapError(
            "large-regime matching regions do not overlap: require "
            f"alpha |c|^(1/n) >= (sigma1/sigma0)^2 = {need:.3g}, got {x:.3g} "
            "(WKBJ needs |z -+ 1| >= sigma1 |alpha c^(1/n)|^(-3/2), the "
            "order-1 construction |z -+ 1| <= sigma0 |alpha c^(1/n)|^(-1))")
    n = cp.order
    y0c = cp.y0
    vt = th.vartheta
    delta_loc = th.sigma0 / aa
    # real abscissas where U_s - c0 crosses the modulus of c - c0 on each side
    ybar_r = _quasi_singular_point(p, cp, c, side=+1, vartheta=vt)
    pieces = []
    # right local pair around ybar_r
    b1r, b2r = _local_simple_pair(p, c, alpha, ybar_r, delta_loc)
    vv, dd, lg = _normalized(v, d, aa)
    a_co, b_co = _solve_combo(b1r, b2r, ybar_r + delta_loc, vv, dd)
    val_r = (lambda y, a0=a_co, b0=b_co: a0 * b1r.value(y) + b0 * b2r.value(y))
    der_r = (lambda y, a0=a_co, b0=b_co: a0 * b1r.deriv(y) + b0 * b2r.deriv(y))
    pc = _Piece(ybar_r - delta_loc, ybar_r + delta_loc, val_r, der_r, scale + lg)
    pieces.append(pc)
    v = complex(pc.val(np.array(ybar_r - delta_loc)))
    d = complex(pc.der(np.array(ybar_r - delta_loc)))
    scale = 0.0 + 0.0j

    two_sided = (n % 2 == 0)
    if two_sided:
        ybar_l = _quasi_singular_point(p, cp, c, side=-1, vartheta=vt)
        # middle WKBJ combination between the two local zones
        a_mid, b_mid = ybar_l + delta_loc, ybar_r - delta_loc
        bp = wkbj_branch(p, c, alpha, y0=b_mid, sign=+1, y_range=(a_mid, b_mid),
                         thresholds=th, n_grid=n_grid)
        bm = wkbj_branch(p, c, alpha, y0=b_mid, sign=-1, y_range=(a_mid, b_mid),
                         thresholds=th, n_grid=n_grid)
        vv, dd, lg = _normalized(v, d, aa)
        cp_, cm_ = _solve_combo(bp, bm, b_mid, vv, dd)
        val_m = (lambda y, cp0=cp_, cm0=cm_: cp0 * bp.value(y) + cm0 * bm.value(y))
        der_m = (lambda y, cp0=cp_, cm0=cm_: cp0 * bp.deriv(y) + cm0 * bm.deriv(y))
        pc = _Piece(a_mid, b_mid, val_m, der_m, scale + lg)
        pieces.append(pc)
        v = complex(pc.val(np.array(a_mid)))
        d = complex(pc.der(np.array(a_mid)))
        scale = 0.0 + 0.0j
        # left local pair
        b1l, b2l = _local_simple_pair(p, c, alpha, ybar_l, delta_loc)
        vv, dd, lg = _normalized(v, d, aa)
        a2, b2_ = _solve_combo(b1l, b2l, ybar_l + delta_loc, vv, dd)
        val_l = (lambda y, a0=a2, b0=b2_: a0 * b1l.value(y) + b0 * b2l.value(y))
        der_l = (lambda y, a0=a2, b0=b2_: a0 * b1l.deriv(y) + b0 * b2l.deriv(y))
        pc = _Piece(ybar_l - delta_loc, ybar_l + delta_loc, val_l, der_l, scale + lg)
        pieces.append(pc)
        v = complex(pc.val(np.array(ybar_l - delta_loc)))
        d = complex(pc.der(np.array(ybar_l - delta_loc)))
        scale = 0.0 + 0.0j
        left_edge = ybar_l - delta_loc
    else:
        left_edge = ybar_r - delta_loc

    # outer-left WKBJ combination
    bp = wkbj_branch(p, c, alpha, y0=left_edge, sign=+1,
                     y_range=(y0c - vt, left_edge), thresholds=th, n_grid=n_grid)
    bm = wkbj_branch(p, c, alpha, y0=left_edge, sign=-1,
                     y_range=(y0c - vt, left_edge), thresholds=th, n_grid=n_grid)
    vv, dd, lg = _normalized(v, d, aa)
    cp_, cm_ = _solve_combo(bp, bm, left_edge, vv, dd)
    val_o = (lambda y, cp0=cp_, cm0=cm_: cp0 * bp.value(y) + cm0 * bm.value(y))
    der_o = (lambda y, cp0=cp_, cm0=cm_: cp0 * bp.deriv(y) + cm0 * bm.deriv(y))
    pieces.append(_Piece(y0c - vt, left_edge, val_o, der_o, scale + lg))
    return pieces, v, d, scale


def _piecewise_branch(pieces, reg, c, alpha, cp) -> SolutionBranch:
    los = np.array([q.lo for q in pieces])
    lo_all, hi_all = pieces[0].lo, pieces[-1].hi

    def _route(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(y < lo_all - 1e-12) or np.any(y > hi_all + 1e-12):
            raise ValueError(
                f"matched branch evaluated outside [{lo_all:.4g}, {hi_all:.4g}]")
        idx = np.searchsorted(los, y, side="right") - 1
        idx = np.clip(idx, 0, len(pieces) - 1)
        return y, idx

    def value(y):
        yy, idx = _route(y)
        out = np.empty(yy.shape, dtype=complex)
        for i, q in enumerate(pieces):
            m = idx == i
            if np.any(m):
                out[m] = q.val(yy[m])
        return out.reshape(np.shape(y)) if np.shape(y) else out[0]

    def deriv(y):
        yy, idx = _route(y)
        out = np.empty(yy.shape, dtype=complex)
        for i, q in enumerate(pieces):
            m = idx == i
            if np.any(m):
                out[m] = q.der(yy[m])
        return out.reshape(np.shape(y)) if np.shape(y) else out[0]

    return SolutionBranch(
        value=value, deriv=deriv, branch="none",
        meta={"method": "matched-minus", "regime": reg, "c": complex(c),
              "alpha": float(alpha), "critical_point": cp,
              "junctions": sorted({q.lo for q in pieces} | {q.hi for q in pieces}),
              "pieces": [(q.lo, q.hi) for q in pieces]})
