"""Edgeworth correction functions as exact polynomial-times-Gaussian objects.

A correction of order k is q_k(x) = P_k(x) * phi(x) where P_k is a rational
polynomial determined by the standardized cumulants.  Only the polynomial is
stored; the Gaussian factor stays symbolic until evaluation, so all algebra
(derivatives, products, integrals) is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtr

from .cumulants import CumulantVector, index_solutions
from .gausspoly import Poly, hermite_poly, integrate_against_gaussian

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HermiteGaussFunction:
    """Function x -> P(x) * phi(x) with phi the standard normal density."""

    poly: Poly

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.poly(x) * np.exp(-0.5 * x * x) / _SQRT_2PI

    def derivative(self) -> "HermiteGaussFunction":
        # d/dx (P phi) = (P' - x P) phi
        return HermiteGaussFunction(self.poly.derivative() - self.poly.shift_up())

    def __add__(self, other: "HermiteGaussFunction") -> "HermiteGaussFunction":
        return HermiteGaussFunction(self.poly + other.poly)

    def __mul__(self, c):
        return HermiteGaussFunction(c * self.poly)

    __rmul__ = __mul__

    def integral(self):
        """Exact integral over the real line."""
        return integrate_against_gaussian(self.poly)

    def is_zero(self) -> bool:
        return self.poly.is_zero()


def _coefficient(c: CumulantVector, rs: tuple):
    """1/(r_1! ... r_k!) * prod_l (gamma_{l+2}/(l+2)!)^{r_l}; exact for rational cumulants."""
    out = Fraction(1)
    for l, r in enumerate(rs, start=1):
        if r == 0:
            continue
        g = c.g(l + 2)
        if g == 0:
            return 0
        out = out * (g / Fraction(math.factorial(l + 2))) ** r / math.factorial(r)
    return out


def _check_k(c: CumulantVector, k: int):
    if not 1 <= k <= c.order - 2:
        raise ValueError(f"k = {k} out of range 1..{c.order - 2} for cumulants of order {c.order}")


def build_qk(c: CumulantVector, k: int) -> HermiteGaussFunction:
    """Density correction q_k of order n^{-k/2}.

    q_k = phi * sum over solutions of r_1 + 2 r_2 + ... + k r_k = k of
    H_{k+2j} times the cumulant coefficient, j = r_1 + ... + r_k.
    """
    _check_k(c, k)
    p = Poly()
    for sol in index_solutions(k):
        coeff = _coefficient(c, sol.rs)
        if coeff != 0:
            p = p + coeff * hermite_poly(k + 2 * sol.j)
    return HermiteGaussFunction(p)


def build_q_score(c: CumulantVector, k: int) -> HermiteGaussFunction:
    """The combination q_k' + x q_k in closed form: phi * sum (k+2j) H_{k+2j-1} * coeff."""
    _check_k(c, k)
    p = Poly()
    for sol in index_solutions(k):
        coeff = _coefficient(c, sol.rs)
        if coeff != 0:
            p = p + ((k + 2 * sol.j) * coeff) * hermite_poly(k + 2 * sol.j - 1)
    return HermiteGaussFunction(p)


def build_Qk(c: CumulantVector, k: int) -> HermiteGaussFunction:
    """Distribution-function correction Q_k; satisfies d/dx Q_k = q_k identically."""
    _check_k(c, k)
    p = Poly()
    for sol in index_solutions(k):
        coeff = _coefficient(c, sol.rs)
        if coeff != 0:
            p = p + coeff * hermite_poly(k + 2 * sol.j - 1)
    return HermiteGaussFunction(-1 * p)


@dataclass(frozen=True)
class EdgeworthModel:
    """Corrections q_1..q_{s-2} for a cumulant vector of order s.

    Orders s <= 10 are recommended: factorial growth of the polynomial
    coefficients starts to cost float digits at large |x| beyond that.
    """

    cumulants: CumulantVector

    @property
    def s(self) -> int:
        return self.cumulants.order

    @property
    def qk(self) -> tuple[HermiteGaussFunction, ...]:
        return tuple(build_qk(self.cumulants, k) for k in range(1, self.s - 1))

    def q_scores(self) -> tuple[HermiteGaussFunction, ...]:
        return tuple(build_q_score(self.cumulants, k) for k in range(1, self.s - 1))


def phi_s_eval(model: EdgeworthModel, n: int, x):
    """Edgeworth density approximant phi_s(x) = phi(x) + sum_k q_k(x) n^{-k/2}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.asarray(x, dtype=float)
    acc = np.ones_like(x)
    for k, q in enumerate(model.qk, start=1):
        acc = acc + q.poly(x) * n ** (-k / 2.0)
    return acc * np.exp(-0.5 * x * x) / _SQRT_2PI


def Phi_s_eval(model: EdgeworthModel, n: int, x):
    """Edgeworth distribution approximant Phi(x) + sum_k Q_k(x) n^{-k/2}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.asarray(x, dtype=float)
    acc = ndtr(x)
    for k in range(1, model.s - 1):
        acc = acc + build_Qk(model.cumulants, k)(x) * n ** (-k / 2.0)
    return acc


@dataclass(frozen=True)
class HalfPowerSeries:
    """sum_k P_k(x) n^{-k/2} kept as exact (k, Poly) terms."""

    terms: tuple  # ((k, Poly), ...)

    def eval(self, n: int, x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for k, p in self.terms:
            acc = acc + p(x) * n ** (-k / 2.0)
        return acc

    def poly_at(self, n: int) -> Poly:
        """Collapse to a single float-coefficient Poly for fixed n."""
        out = Poly()
        for k, p in self.terms:
            out = out + float(n ** (-k / 2.0)) * p
        return out

    @property
    def degree(self) -> int:
        return max((p.degree for _, p in self.terms), default=-1)


def build_u_w(model: EdgeworthModel, n: int):
    """Relative correction u_s = (phi_s - phi)/phi and score sum w_s.

    Returns (u_s as a HalfPowerSeries of q_k polynomials, w_s as a single
    HermiteGaussFunction with the n-powers folded into float coefficients).
    For s = 2 both are identically zero.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u_terms = []
    w_poly = Poly()
    for k in range(1, model.s - 1):
        qk = build_qk(model.cumulants, k)
        if not qk.poly.is_zero():
            u_terms.append((k, qk.poly))
        sk = build_q_score(model.cumulants, k)
        if not sk.poly.is_zero():
            w_poly = w_poly + float(n ** (-k / 2.0)) * sk.poly
    return HalfPowerSeries(tuple(u_terms)), HermiteGaussFunction(w_poly)
