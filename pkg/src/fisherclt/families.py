"""Built-in test distributions: exact cumulants, analytic characteristic functions, densities.

Every family is standardized (zero mean, unit variance) unless noted.  The
characteristic function comes with analytic first and second derivatives so
that off-grid evaluation and the cf-based bounds never rely on interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .cumulants import CumulantVector, MomentVector, moments_to_cumulants

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class CfForms:
    """Analytic characteristic function with derivatives f, f', f''."""

    f: Callable
    d1: Callable | None = None
    d2: Callable | None = None


@dataclass(frozen=True)
class Family:
    name: str
    cumulants: Callable[[int], CumulantVector]
    cf: CfForms | None = None
    density: Callable | None = None
    density_d1: Callable | None = None
    density_d2: Callable | None = None
    # (xmin, xmax) covering essentially all mass of the summand itself
    support_hint: tuple[float, float] | None = None

    @property
    def has_density(self) -> bool:
        return self.density is not None

    @property
    def has_cf(self) -> bool:
        return self.cf is not None


# ---------------------------------------------------------------------------
# gaussian

def _gaussian_cumulants(s: int) -> CumulantVector:
    return CumulantVector((Fraction(0), Fraction(1)) + (Fraction(0),) * (s - 2))


def _phi(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


GAUSSIAN = Family(
    name="gaussian",
    cumulants=_gaussian_cumulants,
    cf=CfForms(
        f=lambda t: np.exp(-0.5 * np.asarray(t, dtype=float) ** 2) + 0j,
        d1=lambda t: -np.asarray(t, dtype=float) * np.exp(-0.5 * np.asarray(t, dtype=float) ** 2) + 0j,
        d2=lambda t: (np.asarray(t, dtype=float) ** 2 - 1.0) * np.exp(-0.5 * np.asarray(t, dtype=float) ** 2) + 0j,
    ),
    density=_phi,
    density_d1=lambda x: -np.asarray(x, dtype=float) * _phi(x),
    density_d2=lambda x: (np.asarray(x, dtype=float) ** 2 - 1.0) * _phi(x),
    support_hint=(-10.0, 10.0),
)


# ---------------------------------------------------------------------------
# standardized exponential: X = E - 1, E ~ Exp(1)

def _exponential_cumulants(s: int) -> CumulantVector:
    # kappa_r(Exp(1)) = (r-1)!, shift kills only kappa_1
    return CumulantVector((Fraction(0), Fraction(1)) + tuple(Fraction(math.factorial(r - 1)) for r in range(3, s + 1)))


def _exp_cf(t):
    t = np.asarray(t, dtype=float)
    return np.exp(-1j * t) / (1.0 - 1j * t)


def _exp_cf_d1(t):
    t = np.asarray(t, dtype=float)
    u = -1j + 1j / (1.0 - 1j * t)
    return _exp_cf(t) * u


def _exp_cf_d2(t):
    t = np.asarray(t, dtype=float)
    u = -1j + 1j / (1.0 - 1j * t)
    du = -1.0 / (1.0 - 1j * t) ** 2
    return _exp_cf(t) * (u * u + du)


def _exp_density(x):
    x = np.asarray(x, dtype=float)
    return np.where(x >= -1.0, np.exp(-np.clip(x + 1.0, 0.0, None)), 0.0)


STANDARDIZED_EXPONENTIAL = Family(
    name="standardized_exponential",
    cumulants=_exponential_cumulants,
    cf=CfForms(f=_exp_cf, d1=_exp_cf_d1, d2=_exp_cf_d2),
    density=_exp_density,
    density_d1=lambda x: -_exp_density(x),
    support_hint=(-1.0, 40.0),
)


# ---------------------------------------------------------------------------
# standardized uniform on [-sqrt(3), sqrt(3)]

def _uniform_cumulants(s: int) -> CumulantVector:
    # raw moments: 3^(r/2)/(r+1) for even r, 0 for odd r
    moments = tuple(
        Fraction(3 ** (r // 2), r + 1) if r % 2 == 0 else Fraction(0) for r in range(1, s + 1)
    )
    return moments_to_cumulants(MomentVector(moments))


def _sinc_family(s):
    """(sin s / s, d/ds, d2/ds2) with series fallback near 0."""
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < 5e-2
    ss = np.where(small, 1.0, s)  # avoid 0-division in the main branch
    g0 = np.where(small, 1.0 - s * s / 6.0 + s**4 / 120.0, np.sin(ss) / ss)
    g1 = np.where(
        small,
        -s / 3.0 + s**3 / 30.0 - s**5 / 840.0,
        (ss * np.cos(ss) - np.sin(ss)) / ss**2,
    )
    g2 = np.where(
        small,
        -1.0 / 3.0 + s * s / 10.0 - s**4 / 168.0,
        ((2.0 - ss * ss) * np.sin(ss) - 2.0 * ss * np.cos(ss)) / ss**3,
    )
    return g0, g1, g2


def _uniform_cf(t):
    return _sinc_family(SQRT3 * np.asarray(t, dtype=float))[0] + 0j


def _uniform_cf_d1(t):
    return SQRT3 * _sinc_family(SQRT3 * np.asarray(t, dtype=float))[1] + 0j


def _uniform_cf_d2(t):
    return 3.0 * _sinc_family(SQRT3 * np.asarray(t, dtype=float))[2] + 0j


def _uniform_density(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < SQRT3, 1.0 / (2.0 * SQRT3), 0.0)


STANDARDIZED_UNIFORM = Family(
    name="standardized_uniform",
    cumulants=_uniform_cumulants,
    cf=CfForms(f=_uniform_cf, d1=_uniform_cf_d1, d2=_uniform_cf_d2),
    density=_uniform_density,
    support_hint=(-SQRT3, SQRT3),
)


# ---------------------------------------------------------------------------
# beta(3,3) on [0,1]: p(x) = 30 (x(1-x))^2 (not standardized; cumulants are)

def _beta33_cumulants(s: int) -> CumulantVector:
    moments = []
    for r in range(1, s + 1):
        m = Fraction(1)
        for i in range(r):
            m *= Fraction(3 + i, 6 + i)
        moments.append(m)
    return moments_to_cumulants(MomentVector(tuple(moments)))


def beta33_pdf(x):
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    return np.where(inside, 30.0 * (x * (1.0 - x)) ** 2, 0.0)


def beta33_pdf_d1(x):
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    return np.where(inside, 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x), 0.0)


BETA33 = Family(
    name="beta33",
    cumulants=_beta33_cumulants,
    cf=None,
    density=beta33_pdf,
    density_d1=beta33_pdf_d1,
    support_hint=(0.0, 1.0),
)


# ---------------------------------------------------------------------------
# standardized gamma(k): X = (G - k)/sqrt(k), G ~ Gamma(k, 1)
# (equals the n = k normalized sum of standardized exponentials)

def standardized_gamma(k: int) -> Family:
    if k < 1:
        raise ValueError("k must be >= 1")
    sqrtk = math.sqrt(float(k))

    def cumulants(s: int) -> CumulantVector:
        kappa = [Fraction(0), Fraction(1)]
        rk = Fraction(k)
        for r in range(3, s + 1):
            raw = rk * math.factorial(r - 1)  # kappa_r(Gamma(k)) = k (r-1)!
            if r % 2 == 0:
                kappa.append(raw / rk ** (r // 2))
            else:
                root = math.isqrt(k)
                if root * root == k:
                    kappa.append(raw / (rk ** ((r - 1) // 2) * root))
                else:
                    kappa.append(float(raw) / float(k) ** (r / 2))
        return CumulantVector(tuple(kappa))

    def f(t):
        t = np.asarray(t, dtype=float)
        return (np.exp(-1j * t / sqrtk) / (1.0 - 1j * t / sqrtk)) ** k

    def d1(t):
        t = np.asarray(t, dtype=float)
        tau = t / sqrtk
        a = _exp_cf(tau)
        b = _exp_cf_d1(tau)
        return k / sqrtk * a ** (k - 1) * b

    def d2(t):
        t = np.asarray(t, dtype=float)
        tau = t / sqrtk
        a = _exp_cf(tau)
        b = _exp_cf_d1(tau)
        c = _exp_cf_d2(tau)
        return (k * (k - 1) / k) * a ** (k - 2) * b * b + a ** (k - 1) * c

    logc = math.lgamma(k)

    def density(x):
        x = np.asarray(x, dtype=float)
        y = sqrtk * x + k
        ok = y > 0.0
        ysafe = np.where(ok, y, 1.0)
        return np.where(ok, sqrtk * np.exp((k - 1) * np.log(ysafe) - ysafe - logc), 0.0)

    def density_d1(x):
        x = np.asarray(x, dtype=float)
        y = sqrtk * x + k
        ok = y > 0.0
        ysafe = np.where(ok, y, 1.0)
        base = np.where(ok, sqrtk * np.exp((k - 1) * np.log(ysafe) - ysafe - logc), 0.0)
        return sqrtk * base * ((k - 1) / ysafe - 1.0) * ok

    return Family(
        name=f"standardized_gamma({k})",
        cumulants=cumulants,
        cf=CfForms(f=f, d1=d1, d2=d2),
        density=density,
        density_d1=density_d1,
        support_hint=(-sqrtk, 15.0 + 4.0 * sqrtk),
    )


# ---------------------------------------------------------------------------
# two-point law: atoms at sqrt((1-p)/p) and -sqrt(p/(1-p)), standardized

def two_point_mixture(p: float = 0.5) -> Family:
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    symmetric = p == 0.5
    x1 = math.sqrt((1.0 - p) / p)
    x2 = -math.sqrt(p / (1.0 - p))

    def cumulants(s: int) -> CumulantVector:
        if symmetric:
            moments = tuple(Fraction(1) if r % 2 == 0 else Fraction(0) for r in range(1, s + 1))
        else:
            moments = tuple(p * x1**r + (1.0 - p) * x2**r for r in range(1, s + 1))
        return moments_to_cumulants(MomentVector(moments))

    def f(t):
        t = np.asarray(t, dtype=float)
        return p * np.exp(1j * t * x1) + (1.0 - p) * np.exp(1j * t * x2)

    def d1(t):
        t = np.asarray(t, dtype=float)
        return 1j * (p * x1 * np.exp(1j * t * x1) + (1.0 - p) * x2 * np.exp(1j * t * x2))

    def d2(t):
        t = np.asarray(t, dtype=float)
        return -(p * x1 * x1 * np.exp(1j * t * x1) + (1.0 - p) * x2 * x2 * np.exp(1j * t * x2))

    return Family(
        name=f"two_point_mixture({p})" if not symmetric else "bernoulli",
        cumulants=cumulants,
        cf=CfForms(f=f, d1=d1, d2=d2),
        density=None,
        support_hint=None,
    )


# ---------------------------------------------------------------------------
# gaussian mixture sum_i w_i N(mu_i, sigma_i^2), affinely standardized

def gaussian_mixture(weights, means, sigmas) -> Family:
    w = [Fraction(v) if not isinstance(v, float) else v for v in weights]
    mu = [Fraction(v) if not isinstance(v, float) else v for v in means]
    sg = [Fraction(v) if not isinstance(v, float) else v for v in sigmas]
    if len(w) != len(mu) or len(w) != len(sg):
        raise ValueError("weights, means, sigmas must have equal length")
    if abs(float(sum(w)) - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1")

    def raw_moments(s: int):
        from .gausspoly import gaussian_moment

        out = []
        for r in range(1, s + 1):
            m_r = Fraction(0)
            for wi, mi, si in zip(w, mu, sg):
                comp = Fraction(0)
                for j in range(0, r + 1):
                    gm = gaussian_moment(j)
                    if gm:
                        comp += math.comb(r, j) * mi ** (r - j) * si**j * gm
                m_r = m_r + wi * comp
            out.append(m_r)
        return out

    def cumulants(s: int) -> CumulantVector:
        return moments_to_cumulants(MomentVector(tuple(raw_moments(s))))

    m1 = float(raw_moments(2)[0])
    m2 = float(raw_moments(2)[1])
    sd = math.sqrt(m2 - m1 * m1)
    # standardized component parameters
    muf = [(float(m) - m1) / sd for m in mu]
    sgf = [float(s_) / sd for s_ in sg]
    wf = [float(x) for x in w]

    def f(t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros(np.shape(t), dtype=complex)
        for wi, mi, si in zip(wf, muf, sgf):
            acc = acc + wi * np.exp(1j * mi * t - 0.5 * (si * t) ** 2)
        return acc

    def d1(t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros(np.shape(t), dtype=complex)
        for wi, mi, si in zip(wf, muf, sgf):
            g = wi * np.exp(1j * mi * t - 0.5 * (si * t) ** 2)
            acc = acc + (1j * mi - si * si * t) * g
        return acc

    def d2(t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros(np.shape(t), dtype=complex)
        for wi, mi, si in zip(wf, muf, sgf):
            g = wi * np.exp(1j * mi * t - 0.5 * (si * t) ** 2)
            acc = acc + ((1j * mi - si * si * t) ** 2 - si * si) * g
        return acc

    def density(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros(np.shape(x), dtype=float)
        for wi, mi, si in zip(wf, muf, sgf):
            acc = acc + wi / (si * math.sqrt(2 * math.pi)) * np.exp(-0.5 * ((x - mi) / si) ** 2)
        return acc

    def density_d1(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros(np.shape(x), dtype=float)
        for wi, mi, si in zip(wf, muf, sgf):
            z = (x - mi) / si
            acc = acc - wi / (si * si * math.sqrt(2 * math.pi)) * z * np.exp(-0.5 * z * z)
        return acc

    lo = min(m - 8.0 * s_ for m, s_ in zip(muf, sgf))
    hi = max(m + 8.0 * s_ for m, s_ in zip(muf, sgf))
    return Family(
        name="gaussian_mixture",
        cumulants=cumulants,
        cf=CfForms(f=f, d1=d1, d2=d2),
        density=density,
        density_d1=density_d1,
        support_hint=(lo, hi),
    )


_STATIC = {
    "gaussian": GAUSSIAN,
    "standardized_exponential": STANDARDIZED_EXPONENTIAL,
    "standardized_uniform": STANDARDIZED_UNIFORM,
    "beta33": BETA33,
}


def get_family(tag: str, **params) -> Family:
    """Look up a family by tag; parametric tags accept keyword parameters."""
    if tag in _STATIC:
        return _STATIC[tag]
    if tag in ("two_point_mixture", "bernoulli"):
        return two_point_mixture(params.get("p", 0.5))
    if tag == "gaussian_mixture":
        return gaussian_mixture(
            params.get("weights", (Fraction(1, 2), Fraction(1, 2))),
            params.get("means", (-1, 1)),
            params.get("sigmas", (Fraction(1, 2), Fraction(1, 2))),
        )
    if tag == "standardized_gamma":
        return standardized_gamma(params.get("k", 4))
    raise KeyError(f"unknown family tag: {tag!r}")


FAMILY_TAGS = ("gaussian", "standardized_exponential", "standardized_uniform", "beta33",
               "two_point_mixture", "bernoulli", "gaussian_mixture", "standardized_gamma")
