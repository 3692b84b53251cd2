"""Cumulant/moment calculus for standardized summands and index enumeration.

Cumulants are always reported for the affinely standardized variable, so
gamma_1 = 0 and gamma_2 = 1.  Rational inputs stay rational whenever the
standardization allows it (odd cumulants divide by an extra factor of the
standard deviation, which may force a float).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .gausspoly import Scalar


class DegenerateDistributionError(ValueError):
    pass


@dataclass(frozen=True)
class MomentVector:
    """Raw moments m_1..m_s; optional absolute moments of matching orders."""

    moments: tuple
    abs_moments: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(self.moments))
        if self.order < 2:
            raise ValueError("need at least two moments")
        if self.moments[1] < self.moments[0] ** 2:
            raise ValueError("m_2 < m_1^2: not a moment sequence")

    @property
    def order(self) -> int:
        return len(self.moments)

    def m(self, r: int):
        """Raw moment of order r (1-based)."""
        return self.moments[r - 1]


@dataclass(frozen=True)
class CumulantVector:
    """Standardized cumulants gamma_1..gamma_s (gamma_1 = 0, gamma_2 = 1)."""

    gamma: tuple
    exact: bool = field(default=True, compare=False)

    def __post_init__(self):
        g = tuple(self.gamma)
        object.__setattr__(self, "gamma", g)
        if len(g) < 2:
            raise ValueError("order must be >= 2")
        if g[0] != 0 or g[1] != 1:
            raise ValueError("cumulants are not standardized")
        object.__setattr__(self, "exact", all(isinstance(c, (Fraction, int)) for c in g))

    @property
    def order(self) -> int:
        return len(self.gamma)

    def g(self, r: int):
        """gamma_r (1-based)."""
        return self.gamma[r - 1]

    def truncated(self, s: int) -> "CumulantVector":
        return CumulantVector(self.gamma[:s])


def _binom(n: int, k: int) -> int:
    return math.comb(n, k)


def raw_cumulants(moments: Sequence[Scalar]) -> list:
    """Cumulants kappa_1..kappa_s of a variable with the given raw moments.

    Triangular recursion: kappa_r = m_r - sum_{j<r} C(r-1, j-1) kappa_j m_{r-j}.
    """
    m = list(moments)
    kappa: list = []
    for r in range(1, len(m) + 1):
        k_r = m[r - 1]
        for j in range(1, r):
            k_r = k_r - _binom(r - 1, j - 1) * kappa[j - 1] * m[r - j - 1]
        kappa.append(k_r)
    return kappa


def cumulants_to_raw_moments(kappa: Sequence[Scalar]) -> list:
    """Inverse of :func:`raw_cumulants`: m_r = sum_{j<=r} C(r-1, j-1) kappa_j m_{r-j}."""
    m: list = []
    for r in range(1, len(kappa) + 1):
        m_r = kappa[r - 1]
        for j in range(1, r):
            m_r = m_r + _binom(r - 1, j - 1) * kappa[j - 1] * m[r - j - 1]
        m.append(m_r)
    return m


def _exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational if it is again rational."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def moments_to_cumulants(m: MomentVector) -> CumulantVector:
    """Standardized cumulants of (X - m_1)/sqrt(var) from raw moments of X.

    Uses kappa_r(aX + b) = a^r kappa_r(X) for r >= 2.  Even orders stay exact
    for rational input; odd orders stay exact when the variance is a perfect
    rational square (or the cumulant vanishes).
    """
    kappa = raw_cumulants(m.moments)
    var = kappa[1]
    if var <= 0:
        raise DegenerateDistributionError("degenerate distribution")
    exact_in = all(isinstance(c, (Fraction, int)) for c in m.moments)
    var_f = Fraction(var) if exact_in else None
    sd_exact = _exact_sqrt(var_f) if exact_in else None
    gamma: list = [0 if exact_in else 0.0, Fraction(1) if exact_in else 1.0]
    for r in range(3, m.order + 1):
        k_r = kappa[r - 1]
        if exact_in:
            if r % 2 == 0:
                gamma.append(Fraction(k_r) / var_f ** (r // 2))
            elif k_r == 0:
                gamma.append(Fraction(0))
            elif sd_exact is not None:
                gamma.append(Fraction(k_r) / sd_exact**r)
            else:
                gamma.append(float(k_r) / float(var_f) ** (r / 2))
        else:
            gamma.append(float(k_r) / float(var) ** (r / 2))
    return CumulantVector(tuple(gamma))


def cumulants_to_moments(c: CumulantVector) -> MomentVector:
    """Raw moments of the standardized variable with cumulants c (round-trip oracle)."""
    kappa = list(c.gamma)
    return MomentVector(tuple(cumulants_to_raw_moments(kappa)))


def empirical_cumulants(sample: Sequence[float], s: int, _min_rel_var: float = 1e-12) -> CumulantVector:
    """Plug-in standardized cumulants up to order s from a sample.

    Biased plug-in moments are used (no k-statistics); intended for sample
    sizes >= 1e5 where the bias is negligible.
    """
    x = np.asarray(sample, dtype=float)
    if x.size < s + 1:
        raise ValueError(f"sample size {x.size} too small for order {s}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    moments = tuple(float(np.mean(x**r)) for r in range(1, s + 1))
    var = moments[1] - moments[0] ** 2
    scale = max(1.0, moments[1])
    if var <= _min_rel_var * scale:
        raise DegenerateDistributionError("degenerate sample")
    return moments_to_cumulants(MomentVector(moments))


class IndexSolution(NamedTuple):
    """Nonnegative solution (r_1..r_k) of r_1 + 2 r_2 + ... + k r_k = k, with j = r_1 + ... + r_k."""

    rs: tuple
    j: int


def index_solutions(k: int) -> list[IndexSolution]:
    """All nonnegative integer solutions of r_1 + 2 r_2 + ... + k r_k = k.

    One solution per partition of k; returned in lexicographic order of the
    multiplicity tuple so downstream sums are reproducible.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out: list[IndexSolution] = []

    def rec(pos: int, remaining: int, acc: list[int]):
        if pos == k:
            if remaining == 0:
                rs = tuple(acc)
                out.append(IndexSolution(rs, sum(rs)))
            return
        weight = pos + 1
        for r in range(remaining // weight + 1):
            rec(pos + 1, remaining - weight * r, acc + [r])

    rec(0, k, [])
    out.sort(key=lambda sol: sol.rs)
    return out


def positive_compositions(total: int, parts: int) -> list[tuple]:
    """Ordered tuples of positive integers of length ``parts`` summing to ``total``.

    Returns an empty list when total < parts.  Lexicographic order.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if total < parts:
        return []
    out: list[tuple] = []

    def rec(remaining: int, slots: int, acc: tuple):
        if slots == 1:
            out.append(acc + (remaining,))
            return
        for first in range(1, remaining - slots + 2):
            rec(remaining - first, slots - 1, acc + (first,))

    rec(total, parts, ())
    return out


def analytic_cumulants(family, s: int) -> CumulantVector:
    """Exact standardized cumulants up to order s for a named family.

    ``family`` is a tag string (see :mod:`fisherclt.families`) or a Family
    instance.
    """
    from .families import get_family

    fam = get_family(family) if isinstance(family, str) else family
    return fam.cumulants(s)
