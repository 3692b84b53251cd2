"""Uniform-mixture decomposition of step densities and explicit Fisher bounds.

The decomposition runs in exact rational arithmetic: the reconstruction and
the total-variation bookkeeping are equalities, not approximations.  The
Fisher-information upper bounds cover sums of three bounded-variation
densities (a product of total variations), three uniforms (interval lengths),
and three i.i.d. summands (integrals of the characteristic function).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .density import CharFunctionGrid, GridDensity
from .functionals import total_variation_norm


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12) if v != int(v) else Fraction(int(v))
    return Fraction(v)


@dataclass(frozen=True)
class StepDensity:
    """Right-continuous step density: value c_k on [x_{k-1}, x_k), exact mass 1."""

    breakpoints: tuple  # x_0 < ... < x_n, Fractions
    heights: tuple      # c_1..c_n >= 0, Fractions

    def __post_init__(self):
        bp = tuple(_frac(b) for b in self.breakpoints)
        hs = tuple(_frac(h) for h in self.heights)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "heights", hs)
        if len(bp) != len(hs) + 1:
            raise ValueError("need one more breakpoint than heights")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(h < 0 for h in hs):
            raise ValueError("heights must be nonnegative")
        if self.mass() != 1:
            raise ValueError(f"total mass {self.mass()} != 1")

    def mass(self) -> Fraction:
        return sum(h * (b1 - b0) for h, b0, b1 in zip(self.heights, self.breakpoints, self.breakpoints[1:]))

    def tv(self) -> Fraction:
        """c_1 + sum |c_{k+1} - c_k| + c_n, exact."""
        hs = self.heights
        return hs[0] + sum(abs(b - a) for a, b in zip(hs, hs[1:])) + hs[-1]

    def value_at(self, x) -> Fraction:
        x = _frac(x)
        for b0, b1, h in zip(self.breakpoints, self.breakpoints[1:], self.heights):
            if b0 <= x < b1:
                return h
        return Fraction(0)

    def to_grid(self, cells_per_unit: int = 2048, pad_frac: float = 0.3) -> GridDensity:
        """Sample onto a uniform grid whose spacing divides every cell width exactly
        when the breakpoints are commensurable; otherwise plain sampling."""
        lo, hi = float(self.breakpoints[0]), float(self.breakpoints[-1])
        span = hi - lo
        n_core = max(int(math.ceil(span * cells_per_unit)), 64)
        dx = span / n_core
        pad = int(math.ceil(pad_frac * n_core))
        x = lo - pad * dx + dx * np.arange(n_core + 2 * pad)
        vals = np.zeros(len(x))
        for b0, b1, h in zip(self.breakpoints, self.breakpoints[1:], self.heights):
            vals[(x >= float(b0)) & (x < float(b1))] = float(h)
        mass = vals.sum() * dx
        return GridDensity(x0=float(x[0]), dx=dx, values=vals / mass, source="step")

    def to_json(self) -> str:
        return json.dumps(
            {
                "breakpoints": [str(b) for b in self.breakpoints],
                "heights": [str(h) for h in self.heights],
            }
        )

    @staticmethod
    def from_json(text: str) -> "StepDensity":
        obj = json.loads(text)
        return StepDensity(
            tuple(Fraction(b) for b in obj["breakpoints"]),
            tuple(Fraction(h) for h in obj["heights"]),
        )


@dataclass(frozen=True)
class UniformMixture:
    """Convex mixture of uniform densities; components are (a, b, weight)."""

    components: tuple  # ((a, b, w), ...) Fractions, b > a, w > 0

    def total_weight(self) -> Fraction:
        return sum(w for _, _, w in self.components)

    def value_at(self, x) -> Fraction:
        x = _frac(x)
        acc = Fraction(0)
        for a, b, w in self.components:
            if a <= x < b:
                acc += w / (b - a)
        return acc

    def tv_integral(self) -> Fraction:
        """Mixture average of component total variations: sum w * 2/(b-a), exact."""
        return sum(w * Fraction(2) / (b - a) for a, b, w in self.components)

    def to_json(self) -> str:
        return json.dumps(
            [{"a": str(a), "b": str(b), "weight": str(w)} for a, b, w in self.components]
        )

    @staticmethod
    def from_json(text: str) -> "UniformMixture":
        rows = json.loads(text)
        return UniformMixture(
            tuple((Fraction(r["a"]), Fraction(r["b"]), Fraction(r["weight"])) for r in rows)
        )


def _decompose_cells(bp: list, hs: list) -> list:
    """Recursive layer peeling; returns (a, b, mass) pieces with exact TV additivity.

    (i) strip zero end cells; (ii) split at interior zero cells; (iii) subtract
    the minimum as one full-width layer and recurse on the remainder.
    """
    # (i) strip zero cells at both ends
    while hs and hs[0] == 0:
        bp, hs = bp[1:], hs[1:]
    while hs and hs[-1] == 0:
        bp, hs = bp[:-1], hs[:-1]
    if not hs:
        return []
    if len(hs) == 1:
        return [(bp[0], bp[1], hs[0] * (bp[1] - bp[0]))]
    # (ii) split at interior zeros
    for i, h in enumerate(hs):
        if h == 0:
            left = _decompose_cells(bp[: i + 1], hs[:i])
            right = _decompose_cells(bp[i + 1:], hs[i + 1:])
            return left + right
    # (iii) all positive: peel one full-width layer at the minimum height
    c_star = min(hs)
    layer = (bp[0], bp[-1], c_star * (bp[-1] - bp[0]))
    remainder = [h - c_star for h in hs]
    return [layer] + _decompose_cells(bp, remainder)


def decompose_step_density(p: StepDensity) -> UniformMixture:
    """Represent a step density as a convex mixture of uniform densities.

    Exact guarantees (rational arithmetic): weights sum to 1, the mixture
    reconstructs p on every cell, the component count is at most the number
    of cells, and the weighted component total variation equals the total
    variation of p.
    """
    pieces = _decompose_cells(list(p.breakpoints), list(p.heights))
    return UniformMixture(tuple((a, b, m) for a, b, m in pieces))


def three_uniform_fisher_bound(a1, a2, a3) -> float:
    """Fisher-information bound 2 (1/a1a2 + 1/a1a3 + 1/a2a3) for a sum of three
    independent uniforms with interval lengths a1, a2, a3."""
    if min(a1, a2, a3) <= 0:
        raise ValueError("lengths must be positive")
    return 2.0 * (1.0 / (a1 * a2) + 1.0 / (a1 * a3) + 1.0 / (a2 * a3))


def _tv_of(p) -> float:
    if isinstance(p, StepDensity):
        return float(p.tv())
    return total_variation_norm(p)


def tv_product_fisher_bound(p1, p2, p3) -> float:
    """Bound (T1 T2 + T1 T3 + T2 T3)/2 on the Fisher information of a sum of three
    independent variables with densities of total variation T_i."""
    t1, t2, t3 = _tv_of(p1), _tv_of(p2), _tv_of(p3)
    return 0.5 * (t1 * t2 + t1 * t3 + t2 * t3)


# ---------------------------------------------------------------------------
# characteristic-function bounds on the total variation of a density


@dataclass(frozen=True)
class CfBound:
    value: float
    verdict: str  # "ok" | "bound inapplicable"


def _cf_integral(f1: CharFunctionGrid, integrand: np.ndarray, decay_needed: float) -> CfBound:
    """Trapezoid integral of a |t|-weighted cf expression with a tail check.

    The integrand must decay faster than |t|^{-1} for the integral to exist;
    ``decay_needed`` is the minimal acceptable decay exponent at the edge.
    """
    t = f1.t
    half = integrand[f1.n // 2:]
    sup = np.maximum.accumulate(half[::-1])[::-1]
    edge = float(sup[-1])
    if edge > 0:
        tt = t[f1.n // 2:]
        mask = tt >= f1.tmax / 10.0
        if np.count_nonzero(mask) >= 8:
            slope = np.polyfit(np.log(tt[mask]), np.log(np.maximum(sup[mask], 1e-320)), 1)[0]
            if -slope <= decay_needed:
                return CfBound(value=math.inf, verdict="bound inapplicable")
            tail = 2.0 * edge * f1.tmax / (-slope - 1.0)
        else:
            tail = 0.0
    else:
        tail = 0.0
    return CfBound(value=float(np.trapezoid(integrand, t)) + tail, verdict="ok")


def cf_tv_bound_first(f1: CharFunctionGrid) -> CfBound:
    """TV bound (1/2) int (|t f''| + 2 |f'| + |t f|) dt; needs analytic f', f''."""
    forms = f1.analytic
    if forms is None or forms.d1 is None or forms.d2 is None:
        raise ValueError("analytic cf derivatives required")
    t = f1.t
    integrand = np.abs(t * forms.d2(t)) + 2.0 * np.abs(forms.d1(t)) + np.abs(t * forms.f(t))
    out = _cf_integral(f1, integrand, decay_needed=1.0)
    return CfBound(value=0.5 * out.value, verdict=out.verdict)


def cf_tv_bound_second(f1: CharFunctionGrid) -> CfBound:
    """TV bound (int |t f|^2 dt * int |(t f)'|^2 dt)^{1/4}; needs analytic f'."""
    forms = f1.analytic
    if forms is None or forms.d1 is None:
        raise ValueError("analytic cf derivative required")
    t = f1.t
    a = np.abs(t * forms.f(t)) ** 2
    b = np.abs(forms.f(t) + t * forms.d1(t)) ** 2
    ia = _cf_integral(f1, a, decay_needed=1.0)
    ib = _cf_integral(f1, b, decay_needed=1.0)
    if ia.verdict != "ok" or ib.verdict != "ok":
        return CfBound(value=math.inf, verdict="bound inapplicable")
    return CfBound(value=(ia.value * ib.value) ** 0.25, verdict="ok")


def fisher_bound_three_iid(f1: CharFunctionGrid) -> CfBound:
    """Fisher bound for a sum of three i.i.d. variables with cf f1.

    Combines the two TV routes: (3/2) sqrt(int |tf|^2 int |(tf)'|^2) and
    (3/8) (int (|tf''| + 2|f'| + |tf|) dt)^2; the minimum of the applicable
    ones is reported.
    """
    candidates = []
    second = cf_tv_bound_second(f1)
    if second.verdict == "ok":
        candidates.append(1.5 * second.value**2)
    first = cf_tv_bound_first(f1)
    if first.verdict == "ok":
        candidates.append(1.5 * (first.value) ** 2)  # (3/8)(2*first)^2 = (3/2) first^2
    if not candidates:
        return CfBound(value=math.inf, verdict="bound inapplicable")
    return CfBound(value=min(candidates), verdict="ok")
