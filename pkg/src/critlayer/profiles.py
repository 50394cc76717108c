"""Shear profiles U_s(y): analytic derivative evaluation, critical points.

Built-in profiles carry closed-form derivatives of every order (the local
constructions consume derivatives up to ~N+6, which finite differencing
cannot supply at the needed accuracy).  User profiles wrap a callback
``eval_deriv(y, k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "ShearProfile", "CriticalPoint", "ProfileError", "RootBracketError",
    "DegenerateOrderError", "eval_profile", "classify_order",
    "find_critical_points", "power_profile", "power_poly_profile",
    "poly_profile", "exp_decay_profile", "tanh_profile", "even_poly_profile",
    "const_profile", "profile_from_name",
]

ORDER_CAP = 8


class ProfileError(ValueError):
    pass


class RootBracketError(ProfileError):
    """Root finder could not bracket/refine a root of U_s - c."""


class DegenerateOrderError(ProfileError):
    """No nonvanishing derivative below the order cap."""


@dataclass(frozen=True)
class ShearProfile:
    """A shear profile with derivative evaluator.

    eval_deriv(y, k) returns the k-th derivative of U_s at y; k = 0 is the
    value.  ``analytic`` profiles accept complex y (needed by the contour
    oracle).  ``u_plus``/``decay_rate`` describe the half-line tail
    |U_s - u_plus| <= C exp(-decay_rate * y); they are None on intervals.
    """

    name: str
    eval_deriv: Callable
    domain: tuple = (-1.0, 1.0)
    u_plus: float | None = None
    decay_rate: float | None = None
    analytic: bool = False
    max_order: int = 64
    params: dict = field(default_factory=dict)

    def __call__(self, y, k: int = 0):
        return self.eval_deriv(y, k)

    def scale(self, y0: float = 0.0) -> float:
        """Length scale available around y0: distance to the nearest finite
        domain end, capped at 1."""
        a, b = self.domain
        dist = min(abs(y0 - a) if np.isfinite(a) else np.inf,
                   abs(b - y0) if np.isfinite(b) else np.inf)
        return float(min(1.0, dist)) if np.isfinite(dist) else 1.0


@dataclass(frozen=True)
class CriticalPoint:
    """(y0, c0) with U_s(y0) = c0; ``order`` = first nonvanishing derivative."""

    y0: float
    c0: float
    order: int


def eval_profile(p: ShearProfile, y, k: int = 0):
    """k-th derivative of U_s at y (y may be an array; complex only for
    analytic profiles)."""
    if k < 0:
        raise ProfileError("derivative order must be >= 0")
    if k > p.max_order:
        raise ProfileError(f"profile {p.name!r} supports derivatives up to {p.max_order}")
    yarr = np.asarray(y)
    if np.iscomplexobj(yarr) and not p.analytic:
        raise ProfileError(f"profile {p.name!r} is not evaluable at complex arguments")
    if not np.iscomplexobj(yarr):
        a, b = p.domain
        if np.any(yarr < a - 1e-12) or np.any(yarr > b + 1e-12):
            raise ProfileError(f"argument outside domain [{a}, {b}] of profile {p.name!r}")
    return p.eval_deriv(y, k)


def classify_order(p: ShearProfile, y0: float, tol: float | None = None,
                   n_max: int = ORDER_CAP) -> int:
    """Smallest n >= 1 with derivatives 1..n-1 below tolerance and the n-th
    above.  Threshold scales with the largest derivative seen so the result
    is invariant under U_s -> lambda U_s."""
    ds = np.array([p.eval_deriv(y0, k) for k in range(1, n_max + 1)], dtype=float)
    thr = (1e-9 if tol is None else tol) * max(1.0, float(np.max(np.abs(ds))))
    for n in range(1, n_max + 1):
        if abs(ds[n - 1]) > thr:
            return n
    raise DegenerateOrderError(
        f"no nonvanishing derivative of U_s at y0={y0} up to order {n_max}")


def find_critical_points(p: ShearProfile, c: complex, window=None,
                         resolution: float = 1e-4) -> list[CriticalPoint]:
    """All real solutions of U_s(y) = c in the window, classified by order.

    Critical points require real c; for Im c != 0 the list is empty.
    Simple roots come from sign changes refined by brentq; tangential roots
    (even order, no sign change) are found at the zeros of U_s'.
    """
    c = complex(c)
    if c.imag != 0.0:
        return []
    cr = c.real
    if window is None:
        window = p.domain
    a, b = float(window[0]), float(window[1])
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ProfileError("find_critical_points needs a finite window")
    npts = max(64, int(np.ceil((b - a) / resolution)) + 1)
    ys = np.linspace(a, b, npts)
    f = np.asarray(p.eval_deriv(ys, 0), dtype=float) - cr

    roots: list[float] = []
    zero_hits = np.where(f == 0.0)[0]
    roots.extend(ys[zero_hits])
    sign = np.sign(f)
    flips = np.where(sign[:-1] * sign[1:] < 0)[0]
    for i in flips:
        try:
            r = brentq(lambda y: float(p.eval_deriv(y, 0)) - cr, ys[i], ys[i + 1],
                       xtol=1e-14, rtol=8.9e-16)
        except Exception as exc:  # pragma: no cover - brentq given a bracket
            raise RootBracketError(
                f"failed to refine root in [{ys[i]}, {ys[i+1]}]: {exc}") from exc
        roots.append(r)

    # Tangencies: stationary points of U_s where U_s - c vanishes.
    df = np.asarray(p.eval_deriv(ys, 1), dtype=float)
    dsign = np.sign(df)
    dflips = np.where(dsign[:-1] * dsign[1:] < 0)[0]
    fscale = max(1.0, float(np.max(np.abs(f))))
    for i in dflips:
        try:
            ystat = brentq(lambda y: float(p.eval_deriv(y, 1)), ys[i], ys[i + 1],
                           xtol=1e-14, rtol=8.9e-16)
        except Exception as exc:
            raise RootBracketError(
                f"failed to refine stationary point in [{ys[i]}, {ys[i+1]}]: {exc}") from exc
        if abs(float(p.eval_deriv(ystat, 0)) - cr) <= 1e-10 * fscale:
            roots.append(ystat)

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or abs(r - merged[-1]) > resolution / 2:
            merged.append(r)
    return [CriticalPoint(y0=r, c0=cr, order=classify_order(p, r)) for r in merged]


# ---------------------------------------------------------------------------
# built-in profiles


def _poly_eval_deriv(coeffs):
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))

    def ev(y, k=0):
        ck = coeffs
        for _ in range(k):
            ck = ck[1:] * np.arange(1, len(ck)) if len(ck) > 1 else np.zeros(1)
        y = np.asarray(y)
        out = np.polynomial.polynomial.polyval(y, ck if len(ck) else np.zeros(1))
        return out if out.shape else out[()]

    return ev


def poly_profile(coeffs, domain=(-1.0, 1.0), name=None) -> ShearProfile:
    """Polynomial profile from ascending coefficients."""
    coeffs = tuple(float(c) for c in np.atleast_1d(coeffs))
    return ShearProfile(
        name=name or f"poly:{list(coeffs)}", eval_deriv=_poly_eval_deriv(coeffs),
        domain=domain, analytic=True, params={"coeffs": coeffs})


def power_profile(n: int, domain=(-1.0, 1.0)) -> ShearProfile:
    """U_s(y) = y**n; critical point of order n at the origin."""
    n = int(n)
    if n < 1:
        raise ProfileError("power profile needs n >= 1")
    coeffs = [0.0] * n + [1.0]
    p = poly_profile(coeffs, domain=domain, name=f"power:n={n}")
    return ShearProfile(name=p.name, eval_deriv=p.eval_deriv, domain=domain,
                        analytic=True, params={"n": n})


def power_poly_profile(n: int, w_coeffs, domain=(-1.0, 1.0)) -> ShearProfile:
    """U_s(y) = y**n (1 + y W(y)) with polynomial W given by ascending coeffs."""
    n = int(n)
    w = np.atleast_1d(np.asarray(w_coeffs, dtype=float))
    coeffs = np.zeros(n + len(w) + 1)
    coeffs[n] = 1.0
    coeffs[n + 1:] = w
    return poly_profile(coeffs, domain=domain,
                        name=f"power_poly:n={n},w={list(map(float, w))}")


def exp_decay_profile(rate: float = 1.0, amplitude: float = 1.0,
                      y_top: float = np.inf) -> ShearProfile:
    """U_s(y) = amplitude * exp(-rate*y) on the half line."""
    rate = float(rate)
    amplitude = float(amplitude)

    def ev(y, k=0):
        y = np.asarray(y)
        out = amplitude * (-rate) ** k * np.exp(-rate * y)
        return out if out.shape else out[()]

    return ShearProfile(name=f"exp_decay:rate={rate}", eval_deriv=ev,
                        domain=(0.0, y_top), u_plus=0.0, decay_rate=rate,
                        analytic=True, params={"rate": rate, "amplitude": amplitude})


def _tanh_deriv_chain(kmax=40):
    # d^k/dx^k tanh x is a polynomial in T = tanh x; precompute coefficients.
    chain = [np.array([0.0, 1.0])]  # T
    for _ in range(kmax):
        pk = chain[-1]
        dp = pk[1:] * np.arange(1, len(pk)) if len(pk) > 1 else np.zeros(1)
        # chain rule: d/dx p(T) = p'(T) (1 - T^2)
        nxt = np.polynomial.polynomial.polymul(dp, np.array([1.0, 0.0, -1.0]))
        chain.append(nxt)
    return chain


_TANH_CHAIN = _tanh_deriv_chain()


def tanh_profile(offset: float = 0.0, amplitude: float = 1.0, width: float = 1.0,
                 domain=None) -> ShearProfile:
    """U_s(y) = amplitude * tanh((y - offset)/width)."""
    offset, amplitude, width = float(offset), float(amplitude), float(width)
    if domain is None:
        domain = (0.0, np.inf)

    def ev(y, k=0):
        y = np.asarray(y)
        t = np.tanh((y - offset) / width)
        out = amplitude * width ** (-k) * np.polynomial.polynomial.polyval(t, _TANH_CHAIN[k]) \
            if k > 0 else amplitude * t
        return out if out.shape else out[()]

    return ShearProfile(
        name=f"tanh:offset={offset}", eval_deriv=ev, domain=domain,
        u_plus=amplitude if domain[1] == np.inf else None,
        decay_rate=2.0 / width if domain[1] == np.inf else None,
        analytic=True, max_order=len(_TANH_CHAIN) - 1,
        params={"offset": offset, "amplitude": amplitude, "width": width})


def even_poly_profile(coeffs) -> ShearProfile:
    """Even polynomial on [-1, 1] (odd coefficients must vanish)."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if np.any(coeffs[1::2] != 0.0):
        raise ProfileError("even_poly requires vanishing odd coefficients")
    return poly_profile(coeffs, domain=(-1.0, 1.0),
                        name=f"even_poly:coeffs={list(map(float, coeffs))}")


def const_profile(u0: float = 0.0, domain=(0.0, np.inf)) -> ShearProfile:
    def ev(y, k=0):
        y = np.asarray(y)
        out = np.full(y.shape, u0) if k == 0 else np.zeros(y.shape)
        return out if out.shape else out[()]

    return ShearProfile(name=f"const:u0={u0}", eval_deriv=ev, domain=domain,
                        u_plus=float(u0), decay_rate=1.0, analytic=True,
                        params={"u0": float(u0)})


def user_profile(eval_deriv, domain, name="user", **kw) -> ShearProfile:
    """Wrap a user callback eval_deriv(y, k)."""
    return ShearProfile(name=name, eval_deriv=eval_deriv, domain=domain, **kw)


_FACTORIES = {
    "power": power_profile,
    "power_poly": power_poly_profile,
    "poly": poly_profile,
    "exp_decay": exp_decay_profile,
    "tanh": tanh_profile,
    "even_poly": even_poly_profile,
    "const": const_profile,
}


def _parse_value(text: str):
    if "," in text:
        return [float(v) for v in text.split(",") if v != ""]
    try:
        return int(text)
    except ValueError:
        pass
    return float(text)


def profile_from_name(spec: str) -> ShearProfile:
    """Build a built-in profile from an identifier like ``power:n=2`` or
    ``even_poly:coeffs=1,0,-1``."""
    head, _, rest = spec.partition(":")
    head = head.strip()
    if head not in _FACTORIES:
        raise ProfileError(f"unknown profile {head!r}; known: {sorted(_FACTORIES)}")
    kwargs = {}
    if rest:
        for item in rest.split(";"):
            key, _, val = item.partition("=")
            if not val:
                raise ProfileError(f"malformed profile parameter {item!r}")
            kwargs[key.strip()] = _parse_value(val.strip())
    if head == "power_poly" and "w" in kwargs:
        kwargs["w_coeffs"] = kwargs.pop("w")
    try:
        return _FACTORIES[head](**kwargs)
    except TypeError as exc:
        raise ProfileError(f"bad parameters for profile {head!r}: {exc}") from exc
