"""Exact polynomial arithmetic and closed-form integration against the standard Gaussian.

Coefficients are rational (``fractions.Fraction``) by default, so products of
Hermite polynomials and their Gaussian moments come out exact.  Floats may be
used in place of rationals; the algebra is generic over the scalar and then
simply computes in double precision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

Scalar = Union[Fraction, int, float]


def _as_scalar(c) -> Scalar:
    if isinstance(c, (Fraction, float)):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, np.floating):
        return float(c)
    return Fraction(c)


class Poly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies ``x**i``.

    The zero polynomial has ``degree == -1``.  Instances are immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_as_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-1) * other

    def __neg__(self) -> "Poly":
        return (-1) * self

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero() or other.is_zero():
                return Poly()
            out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return Poly(out)
        c = _as_scalar(other)
        return Poly([c * a for a in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def shift_up(self) -> "Poly":
        """Multiply by x."""
        if self.is_zero():
            return self
        return Poly((0,) + self.coeffs)

    def __call__(self, x):
        """Horner evaluation; accepts scalars or numpy arrays (result is float)."""
        if not self.coeffs:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def eval_exact(self, x: Scalar) -> Scalar:
        """Horner evaluation keeping the scalar type (exact for rational input)."""
        acc: Scalar = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        if self.is_zero():
            return "Poly(0)"
        terms = [f"{c}*x^{i}" if i else f"{c}" for i, c in enumerate(self.coeffs) if c != 0]
        return "Poly(" + " + ".join(terms) + ")"


X = Poly([0, 1])


@lru_cache(maxsize=None)
def hermite_poly(k: int) -> Poly:
    """Probabilists' Hermite polynomial of degree k (leading coefficient 1).

    Built from H_{k+1} = x*H_k - k*H_{k-1} with H_0 = 1, H_1 = x.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return Poly([1])
    if k == 1:
        return X
    prev, cur = Poly([1]), X
    for m in range(1, k):
        prev, cur = cur, cur.shift_up() - m * prev
    return cur


@lru_cache(maxsize=None)
def gaussian_moment(n: int):
    """E[Z^n] for standard normal Z: 0 for odd n, (n-1)!! for even n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n % 2 == 1:
        return 0
    return math.prod(range(1, n, 2)) if n else 1


def integrate_against_gaussian(p: Poly):
    """Exact value of the integral of p(x) against the standard normal density."""
    total: Scalar = Fraction(0)
    for i, c in enumerate(p.coeffs):
        if c != 0:
            total = total + c * gaussian_moment(i)
    return total
