"""Exact expansion coefficients of the relative Fisher information distance.

The distance of the n-fold normalized sum to the matched Gaussian expands as
c_1/n + c_2/n^2 + ...; each c_j is a polynomial in the standardized cumulants
gamma_3..gamma_{2j+1} and is evaluated here exactly.

Two independent routes are implemented:

* ``compute_cj`` sums, over compositions of 2j, Gaussian integrals of products
  of correction polynomials (two score factors, the rest plain factors).  Each
  of the k factors carries one Gaussian density; dividing by phi^{k-1} leaves
  exactly one, so every integral reduces to a polynomial moment.
* ``series_coefficients`` expands sum_l (-1)^l int w^2 u^l / phi in powers of
  n^{-1/2} symbolically and reads off the same numbers.

Their agreement is asserted in the test suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .cumulants import CumulantVector, positive_compositions
from .edgeworth import build_q_score, build_qk
from .gausspoly import Poly, integrate_against_gaussian


def _factor_polys(c: CumulantVector, max_r: int):
    """Polynomial parts of q_r and of q_r' + x q_r for r = 1..max_r."""
    q = {r: build_qk(c, r).poly for r in range(1, max_r + 1)}
    s = {r: build_q_score(c, r).poly for r in range(1, max_r + 1)}
    return q, s


def compute_aj(c: CumulantVector, j: int):
    """Half-power coefficient a_j (the n^{-j/2} term of the expansion).

    a_j = sum_{k=2}^{j} (-1)^k sum over positive (r_1..r_k) with sum r_i = j of
    the Gaussian integral of S_{r_1} S_{r_2} P_{r_3} ... P_{r_k}.  Vanishes
    exactly for odd j (every integrand has odd total Hermite degree).
    """
    if j < 2:
        raise ValueError("j must be >= 2")
    if c.order < j + 1:
        raise ValueError(f"cumulants through order {j + 1} required, have {c.order}")
    qp, sp = _factor_polys(c, j - 1)
    total = Fraction(0)
    for k in range(2, j + 1):
        sign = (-1) ** k
        for tup in positive_compositions(j, k):
            prod = sp[tup[0]] * sp[tup[1]]
            if prod.is_zero():
                continue
            for r in tup[2:]:
                prod = prod * qp[r]
                if prod.is_zero():
                    break
            else:
                total = total + sign * integrate_against_gaussian(prod)
    return total


def compute_cj(c: CumulantVector, j: int):
    """Expansion coefficient c_j (the 1/n^j term); exact for rational cumulants."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if c.order < 2 * j + 1:
        raise ValueError(f"cumulants through order {2 * j + 1} required, have {c.order}")
    return compute_aj(c, 2 * j)


def leading_coefficient(k: int, gamma_k):
    """gamma_k^2 / (k-1)!: the first nonzero coefficient when gamma_3..gamma_{k-1} vanish."""
    if k < 3:
        raise ValueError("k must be >= 3")
    if isinstance(gamma_k, (Fraction, int)):
        return Fraction(gamma_k) ** 2 / math.factorial(k - 1)
    return float(gamma_k) ** 2 / math.factorial(k - 1)


# ---------------------------------------------------------------------------
# series route

def _nu_mul(a: dict, b: dict, cutoff: int) -> dict:
    """Multiply polynomials in nu with Poly coefficients, truncating at nu^cutoff."""
    out: dict[int, Poly] = {}
    for i, pa in a.items():
        if i > cutoff:
            continue
        for j, pb in b.items():
            d = i + j
            if d > cutoff:
                continue
            prod = pa * pb
            out[d] = out[d] + prod if d in out else prod
    return out


def series_coefficients(c: CumulantVector, j_max: int | None = None) -> dict:
    """Coefficients a_j via the truncated expansion of sum_l (-1)^l int w^2 u^l / phi.

    Valid for j <= s - 2 where s = c.order; returns {j: a_j} over that range
    (clipped to 2*j_max when given).  Independent of :func:`compute_aj`.
    """
    s = c.order
    if s < 3:
        return {}
    cutoff = s - 2 if j_max is None else min(s - 2, 2 * j_max)
    qp, sp = _factor_polys(c, s - 2)
    u = {k: p for k, p in qp.items() if not p.is_zero()}
    w = {k: p for k, p in sp.items() if not p.is_zero()}
    w2 = _nu_mul(w, w, cutoff)
    series: dict[int, Poly] = {}
    term = w2
    for l in range(0, max(s - 3, 1)):  # powers u^0 .. u^{s-4}
        if l > 0:
            term = _nu_mul(term, u, cutoff)
        if not term:
            break
        sign = (-1) ** l
        for d, p in term.items():
            scaled = sign * p
            series[d] = series[d] + scaled if d in series else scaled
        if l >= s - 4:
            break
    out = {d: Fraction(0) for d in range(2, cutoff + 1)}
    for d, p in sorted(series.items()):
        if d >= 2:
            out[d] = integrate_against_gaussian(p)
    return out


@dataclass(frozen=True)
class ExpansionCoefficients:
    """c_1..c_J with J = floor((s-2)/2); carries an exactness flag for provenance."""

    values: tuple
    exact: bool

    @property
    def J(self) -> int:
        return len(self.values)

    def predict(self, n: int) -> float:
        """Truncated prediction sum_j c_j / n^j."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return float(sum(float(cj) / n**j for j, cj in enumerate(self.values, start=1)))

    def to_json(self) -> str:
        rows = []
        for j, cj in enumerate(self.values, start=1):
            frac = Fraction(cj) if not isinstance(cj, Fraction) else cj
            rows.append(
                {
                    "j": j,
                    "numerator": str(frac.numerator),
                    "denominator": str(frac.denominator),
                    "float": float(cj),
                    "exact": self.exact and isinstance(cj, (Fraction, int)),
                }
            )
        return json.dumps(rows, indent=2)


def compute_coefficients(c: CumulantVector) -> ExpansionCoefficients:
    """All coefficients available at the cumulant order of c (J = floor((s-2)/2))."""
    J = (c.order - 2) // 2
    values = tuple(compute_cj(c, j) for j in range(1, J + 1))
    return ExpansionCoefficients(values, exact=c.exact)


def predict_distance(coeffs: ExpansionCoefficients, n: int) -> float:
    return coeffs.predict(n)
