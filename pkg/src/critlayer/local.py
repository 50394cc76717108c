"""Local solutions of the Rayleigh equation near a critical point (alpha = 0).

Near a critical point of order n the equation (U_s - c) psi'' = U_s'' psi has
the explicit solution U_s - c and a second one (U_s - c) I(y, c) with
I = int_A^y dz/(U_s - c)^2.  This module evaluates I in regularized form:

* order 1: repeated integration by parts in t = U_s(y), leaving an explicit
  boundary part plus a smooth remainder integral;
* order n >= 2: rescale t = u Theta^{1/n}(u) with y = |c|^{1/n} u, split the
  transformed density Psi into a two-point Hermite interpolant P plus a
  remainder vanishing to high order at t = +-1, integrate P(t)/(t^n-e^{i
  theta})^2 in closed form through a partial-fraction primitive J, and
  integrate the remainder adaptively in the physical variable.

Two determinations of the logarithm in J give the two localized solutions:
the principal log (continuous along the real path, cut on the negative
reals) anchored on the right builds the branch that decays for y > 0, the
log with argument in (0, 2 pi) anchored on the left builds the branch that
decays for y < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .numerics import CumulativeIntegral, graded_grid
from .power_series import (ps_compose, ps_deriv, ps_invert, ps_pow_unit,
                           ps_recip, ps_trim)
from .profiles import CriticalPoint, ShearProfile

__all__ = [
    "SolutionBranch", "PartialFraction", "ZetaWeight", "LocalConstructionError",
    "SingularEvaluationError", "psi_smooth", "hermite_interpolant",
    "partial_fraction", "primitive_J", "log_branch_jump", "root_sum",
    "bounded_ratio", "singular_integral_I", "local_pair_alpha0",
    "LocalSystem", "Order1System", "wronskian",
]

STANDARD_LOG = "standard_log"
CUT_POS = "cut_on_positive_reals"
HERMITE_CAP = 12


class LocalConstructionError(ValueError):
    pass


class SingularEvaluationError(ValueError):
    """Evaluation requested exactly at a singular point (root of U_s - c)."""


@dataclass
class SolutionBranch:
    """A Rayleigh solution as a (value, derivative) evaluator pair.

    ``branch`` records the log determination ("standard_log",
    "cut_on_positive_reals") or "smooth"/"none" for branches without a log.
    ``meta`` carries the construction record (critical point, c, alpha,
    normalization prefactor, validity grid, integration offsets, ...).
    """

    value: Callable
    deriv: Callable
    branch: str = "none"
    meta: dict = field(default_factory=dict)

    def __call__(self, y):
        return self.value(y)


def wronskian(b1: SolutionBranch, b2: SolutionBranch, y):
    """psi1 psi2' - psi1' psi2 at y (array ok)."""
    return b1.value(y) * b2.deriv(y) - b1.deriv(y) * b2.value(y)


@dataclass(frozen=True)
class ZetaWeight:
    """Two-sided weight zeta(y, c): (|c|^{1/n}+|y|)^n for y > 0 and
    |c|^{2-1/n} (|c|^{1/n}+|y|)^{1-n} for y < 0."""

    n: int
    c_abs: float

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        ay = self.c_abs ** (1.0 / self.n) + np.abs(y)
        pos = ay ** self.n
        neg = self.c_abs ** (2.0 - 1.0 / self.n) * ay ** (1.0 - self.n)
        out = np.where(y >= 0, pos, neg)
        return out if out.shape else out[()]

    def one_sided_at_zero(self):
        """(limit from y>0, limit from y<0); the two coincide at |c|."""
        eps = self.c_abs ** (1.0 / self.n)
        return (eps ** self.n,
                self.c_abs ** (2.0 - 1.0 / self.n) * eps ** (1.0 - self.n))


def psi_smooth(p: ShearProfile, c: complex) -> SolutionBranch:
    """The explicit solution U_s - c of the alpha = 0 equation."""
    c = complex(c)

    def value(y):
        return np.asarray(p.eval_deriv(y, 0), dtype=complex) - c

    def deriv(y):
        return np.asarray(p.eval_deriv(y, 1), dtype=complex)

    return SolutionBranch(value=value, deriv=deriv, branch="smooth",
                          meta={"c": c, "alpha": 0.0, "method": "explicit"})


# ---------------------------------------------------------------------------
# algebra: root sums, Hermite interpolation, partial fractions


def root_sum(n: int, p: int) -> int:
    """sum_{k=1}^{n} (e^{2 i k pi / n})^p: n when n divides p, else 0."""
    n = int(n)
    if n < 1:
        raise ValueError("root_sum needs n >= 1")
    return n if int(p) % n == 0 else 0


def bounded_ratio(t, theta: float, n: int):
    """|(t^2-1)^n / (t^n - e^{i theta})^2|.

    At an exact real root of the denominator the removable limit is
    substituted: +inf for n = 1, 1 for n = 2 (the ratio is identically 1
    when theta = 0), 0 for n >= 3.
    """
    t = np.asarray(t, dtype=float)
    num = (t * t - 1.0) ** n
    den = (t.astype(complex) ** n - np.exp(1j * theta)) ** 2
    out = np.empty(np.shape(t), dtype=float)
    mask = den == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(mask, {1: np.inf, 2: 1.0}.get(n, 0.0),
                       np.abs(np.where(mask, 1.0, num / np.where(mask, 1.0, den))))
    return out if out.shape else out[()]


def hermite_interpolant(vals_minus, vals_plus):
    """Polynomial P of degree 2N-1 with d^k P(-1) = vals_minus[k] and
    d^k P(+1) = vals_plus[k] for 0 <= k <= N-1 (ascending coefficients).

    Built by confluent divided differences; N is capped at 12 because the
    confluent Vandermonde conditioning grows roughly like 4^N.
    """
    vm = np.asarray(vals_minus, dtype=complex)
    vp = np.asarray(vals_plus, dtype=complex)
    if vm.shape != vp.shape or vm.ndim != 1 or len(vm) < 1:
        raise ValueError("need equal-length derivative data at -1 and +1")
    N = len(vm)
    if N > HERMITE_CAP:
        raise ValueError(
            f"Hermite order N={N} exceeds cap {HERMITE_CAP} "
            f"(condition estimate ~4^N = {4.0**N:.1e})")
    m = 2 * N
    z = np.array([-1.0] * N + [1.0] * N)
    dmap = {-1.0: vm, 1.0: vp}
    dd = np.zeros((m, m), dtype=complex)
    dd[:, 0] = np.concatenate([np.full(N, vm[0]), np.full(N, vp[0])])
    for j in range(1, m):
        for i in range(m - j):
            if z[i + j] == z[i]:
                dd[i, j] = dmap[z[i]][j] / math.factorial(j)
            else:
                dd[i, j] = (dd[i + 1, j - 1] - dd[i, j - 1]) / (z[i + j] - z[i])
    # Newton form -> monomial coefficients.
    poly = np.array([dd[0, m - 1]], dtype=complex)
    for j in range(m - 2, -1, -1):
        poly = np.polynomial.polynomial.polymul(poly, np.array([-z[j], 1.0]))
        poly[0] += dd[0, j]
    return ps_trim(poly, m - 1)


@dataclass(frozen=True)
class PartialFraction:
    """Decomposition P(t)/(t^n - e^{i theta})^2 =
    sum_k [alpha_k/(t-t_k)^2 + beta_k/(t-t_k)] + Q(t), t_k = e^{i theta_k},
    theta_k = theta/n + 2 k pi / n."""

    n: int
    theta: float
    alphas: np.ndarray
    betas: np.ndarray
    q_coeffs: np.ndarray
    roots: np.ndarray
    p_coeffs: np.ndarray

    def rational(self, t):
        """P(t)/(t^n - e^{i theta})^2 evaluated directly."""
        t = np.asarray(t, dtype=complex)
        return (np.polynomial.polynomial.polyval(t, self.p_coeffs)
                / (t ** self.n - np.exp(1j * self.theta)) ** 2)

    def reconstruct(self, t):
        """Right-hand side of the decomposition."""
        t = np.asarray(t, dtype=complex)
        d = t[..., None] - self.roots
        s = np.sum(self.alphas / d ** 2 + self.betas / d, axis=-1)
        return s + np.polynomial.polynomial.polyval(t, self.q_coeffs)


def partial_fraction(p_coeffs, n: int, theta: float,
                     coeff_floor: float = 0.0) -> PartialFraction:
    """Decompose P(t)/(t^n - e^{i theta})^2 using the closed forms
    alpha_k = P(t_k) e^{2 i theta_k - 2 i theta}/n^2 and
    beta_k = P'(t_k) e^{2 i theta_k - 2 i theta}/n^2
             - ((n-1)/n^2) P(t_k) e^{i theta_k - 2 i theta}.

    ``coeff_floor``: quotient coefficients below coeff_floor * max|P| are
    flushed to zero (the division's roundoff noise would otherwise be
    amplified by large powers of t; the true coefficients decay like
    |c|^{2 + k/n} and sit far below any such floor exactly when large t
    matter)."""
    n = int(n)
    if n < 1:
        raise ValueError("partial_fraction needs n >= 1")
    P = ps_trim(np.asarray(p_coeffs, dtype=complex), max(len(np.atleast_1d(p_coeffs)) - 1, 0))
    k = np.arange(n)
    theta_k = (theta + 2.0 * np.pi * k) / n
    roots = np.exp(1j * theta_k)
    Pk = np.polynomial.polynomial.polyval(roots, P)
    dP = ps_deriv(P)
    Pdk = np.polynomial.polynomial.polyval(roots, dP)
    phase = np.exp(-2j * theta)
    alphas = Pk * roots ** 2 * phase / n ** 2
    betas = Pdk * roots ** 2 * phase / n ** 2 - (n - 1) / n ** 2 * Pk * roots * phase
    den = np.zeros(2 * n + 1, dtype=complex)
    den[0] = np.exp(2j * theta)
    den[n] = -2.0 * np.exp(1j * theta)
    den[2 * n] = 1.0
    if len(P) - 1 >= 2 * n:
        q, _ = np.polynomial.polynomial.polydiv(P, den)
        if coeff_floor > 0:
            q = np.where(np.abs(q) < coeff_floor * max(1.0, float(np.max(np.abs(P)))),
                         0.0, q)
    else:
        q = np.zeros(1, dtype=complex)
    return PartialFraction(n=n, theta=float(theta), alphas=alphas, betas=betas,
                           q_coeffs=np.atleast_1d(q).astype(complex),
                           roots=roots, p_coeffs=P)


def _log_standard(w):
    return np.log(w)


def _log_cut_pos(w):
    """log with argument in (0, 2 pi): branch cut along the positive reals."""
    w = np.asarray(w, dtype=complex)
    return np.log(w) + 2j * np.pi * (np.imag(w) < 0)


_LOGS = {STANDARD_LOG: _log_standard, CUT_POS: _log_cut_pos}


def primitive_J(pf: PartialFraction, t, branch: str = STANDARD_LOG,
                log_scale: float | None = None):
    """Primitive J(t) of P(t)/(t^n - e^{i theta})^2:

        J = -sum alpha_k/(t - t_k) + sum beta_k log(t - t_k) + Q_1(t)

    with Q_1 the primitive of Q vanishing at 0.  When ``log_scale`` is given
    the constant -(sum beta_k) log(log_scale) is added, i.e. the logs are
    measured as log((t - t_k)/log_scale) in aggregate.  The two supported
    determinations are both continuous along the real t axis since
    Im(t - t_k) = -Im t_k does not change sign there.
    """
    if branch not in _LOGS:
        raise ValueError(f"unknown branch {branch!r}")
    logf = _LOGS[branch]
    t = np.asarray(t, dtype=complex)
    d = t[..., None] - pf.roots
    if np.any(d == 0):
        raise SingularEvaluationError("primitive_J evaluated at a root t_k")
    q1 = np.concatenate(([0.0], pf.q_coeffs / np.arange(1, len(pf.q_coeffs) + 1)))
    out = (-np.sum(pf.alphas / d, axis=-1)
           + np.sum(pf.betas * logf(d), axis=-1)
           + np.polynomial.polynomial.polyval(t, q1))
    if log_scale is not None:
        out = out - np.sum(pf.betas) * np.log(log_scale)
    return out if out.shape else out[()]


def log_branch_jump(pf: PartialFraction):
    """Gamma = -i pi sum_k beta_k sign(Im t_k): the constant picked up by the
    log sum between t -> +inf and t -> -inf along the real axis."""
    return -1j * np.pi * np.sum(pf.betas * np.sign(np.imag(pf.roots)))


# ---------------------------------------------------------------------------
# order >= 2 construction


def _taylor_coeffs(utld_d, z0: float, order: int):
    """Taylor coefficients of the (rescaled) profile at z0."""
    return np.array([utld_d(z0, k) / math.factorial(k) for k in range(order + 1)],
                    dtype=complex)


class LocalSystem:
    """Shared machinery for the order-n >= 2 regularized integral.

    Works in shifted/rescaled variables: z = y - y0, Utld = (U_s - c0)/a_n,
    ctld = (c - c0)/a_n with a_n = U_s^{(n)}(y0)/n!, so that
    Utld(z) = z^n (1 + z W(z)) exactly as in the construction.  The Rayleigh
    equation is invariant under this rescaling.
    """

    def __init__(self, profile: ShearProfile, cp: CriticalPoint, c: complex,
                 N: int = 6, radius: float | None = None,
                 anchor: float | None = None, grid_n: int = 200):
        n = cp.order
        if n < 2:
            raise LocalConstructionError("LocalSystem requires order >= 2")
        self.profile, self.cp, self.n, self.N = profile, cp, n, int(N)
        a_n = complex(profile.eval_deriv(cp.y0, n)) / math.factorial(n)
        if a_n == 0:
            raise LocalConstructionError("vanishing leading derivative at the critical point")
        self.a_n = a_n
        ctld = (complex(c) - cp.c0) / a_n
        if ctld == 0:
            raise LocalConstructionError(
                "c equals the critical value exactly (pure singular limit); "
                "take the limit in the caller")
        self.c = complex(c)
        self.ctld = ctld
        self.cabs = abs(ctld)
        self.theta = float(np.angle(ctld) % (2.0 * np.pi))
        self.eps = self.cabs ** (1.0 / n)

        scale = profile.scale(cp.y0)
        self.radius = float(radius) if radius is not None else 0.3 * scale
        if self.eps > 0.75 * self.radius:
            raise LocalConstructionError(
                f"|c - c0|^(1/n) = {self.eps:.3g} too large for validity radius "
                f"{self.radius:.3g}")
        self._setup_tilde()
        self._validate_radius()
        self.anchor = float(anchor) if anchor is not None else self.radius / 2.0
        if not (0 < self.anchor < self.radius):
            raise LocalConstructionError("anchor must lie in (0, radius)")
        self._setup_hermite()
        self._setup_grid(grid_n)

    # -- rescaled profile -------------------------------------------------

    def _setup_tilde(self):
        p, cp, n = self.profile, self.cp, self.n
        K0 = n + 14
        tay = np.array([complex(p.eval_deriv(cp.y0, k)) / math.factorial(k)
                        for k in range(K0 + 1)]) / self.a_n
        tay[0] = 0.0
        tay[1:n] = 0.0
        tay[n] = 1.0
        self._tay0 = tay
        self._r_taylor = min(0.05 * p.scale(cp.y0), self.radius / 4.0)
        # g(z) = z (1 + z W(z))^{1/n} as a series around 0
        u_unit = np.zeros(K0 + 1 - n, dtype=complex)
        u_unit[0] = 1.0
        u_unit[1:] = tay[n + 1:]
        gser0 = np.concatenate(([0.0], ps_pow_unit(u_unit, 1.0 / n, K0 - n)))
        self._gser0 = gser0
        self._gpser0 = ps_deriv(gser0)

    def utld(self, z, k: int = 0):
        """k-th derivative of the rescaled profile; Taylor near the critical
        point (avoids cancellation in U_s(y0+z) - c0)."""
        z = np.asarray(z, dtype=float)
        near = np.abs(z) <= self._r_taylor
        ck = self._tay0
        for _ in range(k):
            ck = ps_deriv(ck)
        out_near = np.polynomial.polynomial.polyval(z, ck)
        direct = np.asarray(self.profile.eval_deriv(self.cp.y0 + z, k), dtype=complex)
        if k == 0:
            direct = direct - self.cp.c0
        out = np.where(near, out_near, direct / self.a_n)
        return np.real(out) if np.isrealobj(self._tay0) else out

    def g(self, z):
        z = np.asarray(z, dtype=float)
        near = np.abs(z) <= self._r_taylor
        gn = np.polynomial.polynomial.polyval(z, self._gser0)
        u = np.where(near, 1.0, self.utld(np.where(near, self._r_taylor * 2, z)))
        gf = np.sign(z) * np.abs(u) ** (1.0 / self.n)
        out = np.where(near, gn, gf)
        return np.real(out)

    def g_prime(self, z):
        z = np.asarray(z, dtype=float)
        near = np.abs(z) <= self._r_taylor
        gp_near = np.polynomial.polynomial.polyval(z, self._gpser0)
        zf = np.where(near, self._r_taylor * 2, z)
        gf = self.g(zf)
        with np.errstate(divide="ignore", invalid="ignore"):
            gp_far = np.real(self.utld(zf, 1)) / (self.n * gf ** (self.n - 1))
        out = np.where(near, gp_near, gp_far)
        return np.real(out)

    def t_of_y(self, z):
        return self.g(z) / self.eps

    def _validate_radius(self):
        for _ in range(7):
            zs = np.linspace(-self.radius, self.radius, 101)
            zs = zs[np.abs(zs) > 1e-3 * self.radius]
            vals = np.real(self.utld(zs)) * np.sign(zs) ** self.n
            gp = self.g_prime(zs)
            if np.all(vals > 0) and np.all(gp > 0):
                return
            self.radius *= 0.6
        raise LocalConstructionError(
            "profile does not keep the y^n (1 + yW) sign pattern near the "
            "critical point; reduce the radius")

    def _y_of_t_scalar(self, t: float) -> float:
        """Invert g(z) = eps * t (g is monotone increasing on the radius)."""
        target = self.eps * t
        a, b = (0.0, self.radius) if t > 0 else (-self.radius, 0.0)
        if (float(self.g(b)) - target) * (float(self.g(a)) - target) > 0:
            raise LocalConstructionError(
                f"t = {t} not reachable inside the validity radius")
        return float(brentq(lambda zz: float(self.g(zz)) - target, a, b,
                            xtol=1e-16, rtol=8.9e-16))

    # -- Hermite data at t = +-1 ------------------------------------------

    def _psi_derivs_at(self, tsign: int):
        K = self.N + 4
        z_star = self._y_of_t_scalar(float(tsign))
        tay = _taylor_coeffs(self.utld, z_star, K + 1)
        u0 = tay[0]
        s = tay / u0
        s[0] = 1.0
        g0 = np.sign(z_star) * abs(u0) ** (1.0 / self.n)
        gser = g0 * ps_pow_unit(s, 1.0 / self.n, K)
        tser = gser / self.eps
        hser = ps_invert(tser, K)
        gp_h = ps_deriv(gser, K - 1)
        gp_tau = ps_compose(gp_h, ps_trim(hser, K - 1), K - 1)
        psiser = ps_recip(gp_tau, K - 1)
        ks = np.arange(self.N)
        facts = np.array([math.factorial(int(k)) for k in ks], dtype=float)
        derivs = psiser[: self.N] * facts
        # True derivatives scale like |c|^{k/n}; entries below the series
        # noise floor would otherwise seed O(eps_mach) polynomial
        # coefficients that blow up at t ~ radius/|c|^{1/n}.
        derivs[np.abs(derivs) < 2e-12 * max(1.0, abs(derivs[0]))] = 0.0
        return derivs, z_star

    def _setup_hermite(self):
        dm, self.z_minus = self._psi_derivs_at(-1)
        dp, self.z_plus = self._psi_derivs_at(+1)
        self.psi_derivs_minus, self.psi_derivs_plus = dm, dp
        P = hermite_interpolant(dm, dp)
        P[np.abs(P) < 1e-13 * max(1.0, float(np.max(np.abs(P))))] = 0.0
        self.P = P
        unit = np.zeros_like(self.P)
        unit[0] = 1.0
        self.zero_remainder = (
            np.max(np.abs(self.P - unit)) < 1e-12
            and np.max(np.abs(dm - unit[: self.N])) < 1e-12
            and np.max(np.abs(dp - unit[: self.N])) < 1e-12)
        self.pf = partial_fraction(self.P, self.n, self.theta, coeff_floor=1e-13)

    # -- evaluators --------------------------------------------------------

    def J(self, t, branch: str):
        return primitive_J(self.pf, t, branch=branch, log_scale=np.sqrt(self.cabs))

    def remainder_integrand(self, z):
        """(1 - P(t(z)) g'(z)) / (Utld(z) - ctld)^2: the density of I - I_P
        in the physical variable."""
        t = self.t_of_y(z)
        num = 1.0 - np.polynomial.polynomial.polyval(
            np.asarray(t, dtype=complex), self.P) * self.g_prime(z)
        return num / (self.utld(z) - self.ctld) ** 2

    def _setup_grid(self, grid_n: int):
        r = self.radius
        self.zgrid = graded_grid(
            -r, r, special=(0.0, self.eps, -self.eps, self.anchor, -self.anchor),
            n_base=grid_n, min_spacing=max(self.eps * 1e-3, 1e-9))
        if self.zero_remainder:
            self._rcum = None
        else:
            self._rcum = CumulativeIntegral(self.zgrid, self.remainder_integrand)

    def integral(self, z, side: int):
        """The adjusted I(y, c) for the branch anchored at side*anchor
        (side=+1: standard log; side=-1: cut on the positive reals).
        The J anchor term is dropped and the logs carry the |c|^{1/2}
        rescale; ``integral_offset`` records the constant relative to the
        plain integral from the anchor."""
        branch = STANDARD_LOG if side > 0 else CUT_POS
        z = np.asarray(z, dtype=float)
        if np.any(np.abs(z) > self.radius * (1 + 1e-12)):
            raise LocalConstructionError(
                f"evaluation outside validity radius {self.radius:.3g}")
        jpart = self.cabs ** (-2.0 + 1.0 / self.n) * self.J(self.t_of_y(z), branch)
        if self._rcum is None:
            rpart = 0.0
        else:
            rpart = self._rcum(z) - self._rcum(side * self.anchor)
        return jpart + rpart

    def integral_offset(self, side: int) -> complex:
        """integral() minus the plain int_{side*anchor}^{y}; re-apply this to
        compare against direct quadrature."""
        branch = STANDARD_LOG if side > 0 else CUT_POS
        zA = side * self.anchor
        return complex(self.cabs ** (-2.0 + 1.0 / self.n)
                       * self.J(self.t_of_y(np.array(zA)), branch))

    def branch(self, side: int) -> SolutionBranch:
        """The localized solution |c|^{2-1/n} (Utld - ctld) I_side; side=+1
        decays for y > 0 (psi_2), side=-1 decays for y < 0 (psi_1)."""
        pref = self.cabs ** (2.0 - 1.0 / self.n)
        y0 = self.cp.y0

        def value(y):
            z = np.asarray(y, dtype=float) - y0
            return pref * (self.utld(z) - self.ctld) * self.integral(z, side)

        def deriv(y):
            z = np.asarray(y, dtype=float) - y0
            return pref * (self.utld(z, 1) * self.integral(z, side)
                           + 1.0 / (self.utld(z) - self.ctld))

        det = STANDARD_LOG if side > 0 else CUT_POS
        return SolutionBranch(
            value=value, deriv=deriv, branch=det,
            meta={
                "critical_point": self.cp, "c": self.c, "alpha": 0.0,
                "method": "local-critical-layer", "order": self.n,
                "n_hermite": self.N, "anchor": side * self.anchor,
                "prefactor": pref, "tilde_scale": self.a_n,
                "integration_offset": self.integral_offset(side),
                "log_rescale": np.sqrt(self.cabs),
                "validity_grid": self.zgrid + y0,
                "radius": self.radius,
                "zero_remainder": self.zero_remainder,
                "system": self,
            })


# ---------------------------------------------------------------------------
# order 1 construction (integration by parts)


class Order1System:
    """Regularized I(y, c) near a simple point of U_s - c (order-1 critical
    point, or the simple quasi-singular points of the large-|alpha c^{1/n}|
    regime).  Four integrations by parts in t = Utld(z) leave boundary terms
    V, V', V'', V''' against 1/(t-c), log, and polynomial-log primitives,
    plus an adaptive integral of V'''' against the C^1 primitive."""

    M = 4

    def __init__(self, profile: ShearProfile, center: float, c: complex,
                 radius: float | None = None, anchor: float | None = None,
                 branch: str = STANDARD_LOG, grid_n: int = 160):
        self.profile = profile
        self.y0 = float(center)
        a1 = complex(profile.eval_deriv(self.y0, 1))
        if a1 == 0:
            raise LocalConstructionError("Order1System requires U_s'(center) != 0")
        self.a_n = a1
        self.c0 = float(np.real(profile.eval_deriv(self.y0, 0)))
        self.c = complex(c)
        self.ctld = (self.c - self.c0) / a1
        if self.ctld == 0:
            raise LocalConstructionError("c equals the critical value exactly")
        self.cabs = abs(self.ctld)
        scale = profile.scale(self.y0)
        self.radius = float(radius) if radius is not None else 0.3 * scale
        self.branch_name = branch
        self._logf = _LOGS[branch]
        self._validate()
        self.anchor = float(anchor) if anchor is not None else self.radius / 2.0
        self._setup_grid(grid_n)
        self.cp = CriticalPoint(y0=self.y0, c0=self.c0, order=1)

    def utld(self, z, k: int = 0):
        out = np.asarray(self.profile.eval_deriv(self.y0 + np.asarray(z, dtype=float), k),
                         dtype=complex)
        if k == 0:
            out = out - self.c0
        return out / self.a_n

    def _validate(self):
        for _ in range(7):
            zs = np.linspace(-self.radius, self.radius, 81)
            if np.all(np.real(self.utld(zs, 1)) > 0.25):
                return
            self.radius *= 0.6
        raise LocalConstructionError(
            "U_s' varies too much for the order-1 change of variables; "
            "reduce the radius")

    def _v_derivs(self, z: float):
        """V, V', V'', V'''' at t = Utld(z) via local series inversion."""
        K = self.M + 2
        tay = _taylor_coeffs(self.utld, z, K)
        hser = ps_invert(tay, K)
        tp = ps_deriv(tay, K - 1)
        vser = ps_recip(ps_compose(tp, ps_trim(hser, K - 1), K - 1), K - 1)
        facts = np.array([math.factorial(k) for k in range(self.M + 1)])
        return vser[: self.M + 1] * facts

    def _lambda2(self, t):
        d = t - self.ctld
        return d * d / 2.0 * (self._logf(d) - 1.5)

    def _boundary(self, z: float) -> complex:
        t = complex(self.utld(z))
        d = t - self.ctld
        if d == 0:
            raise SingularEvaluationError("order-1 boundary term at the singular point")
        v = self._v_derivs(z)
        lg = self._logf(d)
        lam0 = lg
        lam1 = d * (lg - 1.0)
        lam2 = d * d / 2.0 * (lg - 1.5)
        return -v[0] / d + v[1] * lam0 - v[2] * lam1 + v[3] * lam2

    def _remainder_integrand(self, z: float) -> complex:
        v4 = self._v_derivs(z)[self.M]
        t = complex(self.utld(z))
        return -v4 * self._lambda2(t) * complex(self.utld(z, 1))

    def _setup_grid(self, grid_n: int):
        r = self.radius
        yc = float(np.real(self.ctld))  # quasi-singular point in z (Utld ~ z)
        self.zgrid = graded_grid(-r, r, special=(0.0, yc, self.anchor, -self.anchor),
                                 n_base=grid_n,
                                 min_spacing=max(abs(self.ctld) * 1e-3, 1e-9))
        self._rcum = CumulativeIntegral(
            self.zgrid, np.vectorize(self._remainder_integrand, otypes=[complex]))

    def integral(self, z):
        """I(y, c) = int_{anchor}^{y} dz/(Utld - ctld)^2 (boundary terms kept:
        no constant adjustment for order 1)."""
        z = np.asarray(z, dtype=float)
        if np.any(np.abs(z) > self.radius * (1 + 1e-12)):
            raise LocalConstructionError(
                f"evaluation outside validity radius {self.radius:.3g}")
        bA = self._boundary(self.anchor)
        flat = np.atleast_1d(z)
        vals = np.array([self._boundary(float(zz)) for zz in flat], dtype=complex)
        out = vals - bA + np.atleast_1d(self._rcum(flat) - self._rcum(self.anchor))
        return out.reshape(np.shape(z)) if np.shape(z) else out[0]

    def integral_offset(self) -> complex:
        return 0.0 + 0.0j

    def pair(self) -> tuple[SolutionBranch, SolutionBranch]:
        """(smooth branch Utld - ctld, integral branch |c| (Utld-ctld) I)."""
        y0 = self.y0
        pref = self.cabs  # |c|^{2-1/n} at n = 1

        def v1(y):
            z = np.asarray(y, dtype=float) - y0
            return self.utld(z) - self.ctld

        def d1(y):
            z = np.asarray(y, dtype=float) - y0
            return self.utld(z, 1)

        def v2(y):
            z = np.asarray(y, dtype=float) - y0
            return pref * (self.utld(z) - self.ctld) * self.integral(z)

        def d2(y):
            z = np.asarray(y, dtype=float) - y0
            return pref * (self.utld(z, 1) * self.integral(z)
                           + 1.0 / (self.utld(z) - self.ctld))

        meta = {
            "critical_point": self.cp, "c": self.c, "alpha": 0.0,
            "order": 1, "method": "order1-ibp", "anchor": self.anchor,
            "tilde_scale": self.a_n, "integration_offset": 0.0 + 0.0j,
            "validity_grid": self.zgrid + y0, "radius": self.radius,
            "system": self,
        }
        b1 = SolutionBranch(value=v1, deriv=d1, branch="smooth",
                            meta={**meta, "prefactor": 1.0})
        b2 = SolutionBranch(value=v2, deriv=d2, branch=self.branch_name,
                            meta={**meta, "prefactor": pref})
        return b1, b2


# ---------------------------------------------------------------------------
# public entry points


def singular_integral_I(p: ShearProfile, cp: CriticalPoint, c: complex, y,
                        A: float | None = None, N: int = 6) -> complex:
    """The regularized variation-of-constants integral I(y, c) near the
    critical point (I_P + I_R for order >= 2 with the stated constant
    adjustments; plain anchored integral for order 1)."""
    if cp.order == 1:
        sys_ = Order1System(p, cp.y0, c, anchor=A)
        return complex(sys_.integral(np.asarray(y, dtype=float) - cp.y0))
    sys_ = LocalSystem(p, cp, c, N=N, anchor=A)
    return complex(sys_.integral(np.asarray(y, dtype=float) - cp.y0, side=+1))


def local_pair_alpha0(p: ShearProfile, cp: CriticalPoint, c: complex,
                      N: int = 6, radius: float | None = None,
                      anchor: float | None = None) -> tuple[SolutionBranch, SolutionBranch]:
    """The localized pair (psi_1, psi_2) of the alpha = 0 equation near the
    critical point: |psi_1| <~ zeta(y, c) (grows to the right), |psi_2| <~
    zeta(-y, c).  Both are exact solutions; the Wronskian is constant and of
    order |c - c0|^{2-1/n}."""
    n = cp.order
    if n == 1:
        sys_ = Order1System(p, cp.y0, c, radius=radius, anchor=anchor)
        return sys_.pair()
    sys_ = LocalSystem(p, cp, c, N=N, radius=radius, anchor=anchor)
    psi1 = sys_.branch(side=-1)
    psi2 = sys_.branch(side=+1)
    return psi1, psi2
