"""Grid densities and characteristic functions with Fourier inversion.

Densities of normalized sums are produced by powering an analytic summand
characteristic function and inverting on a conjugate (x, t) grid pair:
dx * dt = 2*pi/N, so fixing the x-range and point count fixes tmax.
Derivatives come from spectral multipliers, never from differencing a
clipped density.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve

from .families import CfForms, Family

DEFAULT_N = 1 << 16
DEFAULT_XMAX = 40.0
TAIL_TOL = 1e-10
MASS_TOL = 1e-8
CENTRAL_TAIL_TOL = 1e-6


class CfTailError(ValueError):
    """Characteristic function decays too slowly at the grid edge for inversion."""


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridFunction:
    """Real-valued function sampled on a uniform grid x_j = x0 + j*dx."""

    x0: float
    dx: float
    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)


@dataclass(frozen=True)
class GridDensity:
    """Nonnegative normalized density on a uniform grid.

    Optional spectral/analytic derivative tables ride along so functionals
    never have to difference the (possibly clipped) values.
    """

    x0: float
    dx: float
    values: np.ndarray
    deriv: np.ndarray | None = None
    deriv2: np.ndarray | None = None
    clipped_mass: float = 0.0
    source: str = "grid"

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def xmax(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    def mass(self) -> float:
        return float(np.sum(self.values) * self.dx)

    def mean(self) -> float:
        return float(np.sum(self.x * self.values) * self.dx)

    def var(self) -> float:
        m = self.mean()
        return float(np.sum((self.x - m) ** 2 * self.values) * self.dx)

    def abs_moment(self, s: float) -> float:
        return float(np.sum(np.abs(self.x) ** s * self.values) * self.dx)

    def deriv_table(self) -> np.ndarray:
        """Derivative values: attached table if present, else central differences."""
        if self.deriv is not None:
            return self.deriv
        return np.gradient(self.values, self.dx)

    def deriv2_table(self) -> np.ndarray:
        if self.deriv2 is not None:
            return self.deriv2
        d2 = np.zeros_like(self.values)
        d2[1:-1] = (self.values[2:] - 2.0 * self.values[1:-1] + self.values[:-2]) / self.dx**2
        return d2

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x", "p"])
        for xi, pi in zip(self.x, self.values):
            w.writerow([repr(float(xi)), repr(float(pi))])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "GridDensity":
        rows = list(csv.reader(io.StringIO(text)))
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        x, p = data[:, 0], data[:, 1]
        return GridDensity(x0=float(x[0]), dx=float(x[1] - x[0]), values=p, source="csv")


def _validate(values: np.ndarray, dx: float, renormalize: bool = True):
    values = np.asarray(values, dtype=float)
    neg = values < 0
    clipped = float(np.sum(values[neg]) * -dx) if np.any(neg) else 0.0
    if np.any(neg):
        values = np.where(neg, 0.0, values)
    mass = float(np.sum(values) * dx)
    if mass <= 0:
        raise GridError("empty density")
    if abs(mass - 1.0) > MASS_TOL and not renormalize:
        raise GridError(f"mass {mass} deviates from 1")
    values = values / mass
    return values, clipped


def _check_central_tail(values: np.ndarray, dx: float):
    n = len(values)
    k = n // 20  # 5% of points on each side
    outer = float((np.sum(values[:k]) + np.sum(values[n - k:])) * dx)
    return outer


def from_function(
    fn: Callable,
    xmin: float,
    xmax: float,
    n: int = DEFAULT_N,
    deriv_fn: Callable | None = None,
    deriv2_fn: Callable | None = None,
    max_widenings: int = 6,
) -> GridDensity:
    """Sample a density formula on [xmin, xmax); widens the range until the
    outer 10% of the grid carries less than 1e-6 mass."""
    for _ in range(max_widenings + 1):
        dx = (xmax - xmin) / n
        x = xmin + dx * np.arange(n)
        raw = np.asarray(fn(x), dtype=float)
        values, clipped = _validate(raw, dx)
        if _check_central_tail(values, dx) < CENTRAL_TAIL_TOL:
            scale = float(np.sum(raw) * dx)
            d1 = np.asarray(deriv_fn(x), dtype=float) / scale if deriv_fn else None
            d2 = np.asarray(deriv2_fn(x), dtype=float) / scale if deriv2_fn else None
            return GridDensity(x0=xmin, dx=dx, values=values, deriv=d1, deriv2=d2,
                               clipped_mass=clipped, source="formula")
        span = xmax - xmin
        xmin, xmax = xmin - 0.25 * span, xmax + 0.25 * span
    raise GridError("could not satisfy the central-tail requirement by widening")


def uniform_density(a: float, b: float, cells: int = 4096, pad_frac: float = 0.3) -> GridDensity:
    """Uniform density on [a, b) with the grid aligned to the endpoints.

    dx = (b-a)/cells exactly, so the sampled mass is exactly 1 and the grid
    total variation is exactly 2/(b-a)."""
    if b <= a:
        raise GridError("b must exceed a")
    dx = (b - a) / cells
    pad = int(math.ceil(pad_frac * cells))
    n = cells + 2 * pad
    values = np.zeros(n)
    values[pad:pad + cells] = 1.0 / (b - a)
    return GridDensity(x0=a - pad * dx, dx=dx, values=values, source="uniform")


# ---------------------------------------------------------------------------
# characteristic functions


@dataclass(frozen=True)
class CharFunctionGrid:
    """Complex characteristic function sampled at t_m = -tmax + m*dt, m = 0..N-1.

    When built from a family, the analytic forms tag along so that powering
    can evaluate off-grid arguments exactly.
    """

    tmax: float
    dt: float
    values: np.ndarray
    analytic: CfForms | None = None
    # origin of the conjugate x-grid (set by forward transforms so a
    # round trip reproduces the source samples exactly)
    x0_hint: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values)
        m0 = self.n // 2
        if abs(v[m0] - 1.0) > 1e-9:
            raise GridError("characteristic function must equal 1 at t = 0")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def t(self) -> np.ndarray:
        return -self.tmax + self.dt * np.arange(self.n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "re", "im"])
        for ti, vi in zip(self.t, self.values):
            w.writerow([repr(float(ti)), repr(float(vi.real)), repr(float(vi.imag))])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "CharFunctionGrid":
        rows = list(csv.reader(io.StringIO(text)))
        data = np.array([[float(a), float(b), float(c)] for a, b, c in rows[1:]])
        t = data[:, 0]
        dt = float(t[1] - t[0])
        return CharFunctionGrid(tmax=float(-t[0]), dt=dt, values=data[:, 1] + 1j * data[:, 2])


def cf_for_grid(forms: CfForms, xmax: float = DEFAULT_XMAX, n: int = DEFAULT_N) -> CharFunctionGrid:
    """Sample analytic cf on the t-grid conjugate to an x-grid of n points on [-xmax, xmax)."""
    dt = math.pi / xmax
    tmax = 0.5 * n * dt
    t = -tmax + dt * np.arange(n)
    values = np.asarray(forms.f(t), dtype=complex)
    return CharFunctionGrid(tmax=tmax, dt=dt, values=values, analytic=forms)


def family_cf(family: Family, xmax: float = DEFAULT_XMAX, n: int = DEFAULT_N) -> CharFunctionGrid:
    if family.cf is None:
        raise GridError(f"family {family.name} has no analytic characteristic function")
    return cf_for_grid(family.cf, xmax=xmax, n=n)


def cf_diagnostic_grid(forms: CfForms, tmax: float = 1500.0, dt: float = 0.02) -> CharFunctionGrid:
    """Wide t-window sampling for decay diagnostics (not tied to an x-grid)."""
    m = int(round(tmax / dt))
    t = dt * np.arange(-m, m + 1)
    return CharFunctionGrid(tmax=m * dt, dt=dt, values=np.asarray(forms.f(t), dtype=complex), analytic=forms)


def _powered_forms(forms: CfForms, n: int) -> CfForms:
    """Analytic forms of F(t) = f(t/sqrt(n))^n with chain-rule derivatives."""
    rn = math.sqrt(float(n))

    def f(t):
        return forms.f(np.asarray(t, dtype=float) / rn) ** n

    d1 = d2 = None
    if forms.d1 is not None:
        def d1(t):
            tau = np.asarray(t, dtype=float) / rn
            return rn * forms.f(tau) ** (n - 1) * forms.d1(tau)

        if forms.d2 is not None:
            def d2(t):
                tau = np.asarray(t, dtype=float) / rn
                a = forms.f(tau)
                b = forms.d1(tau)
                c = forms.d2(tau)
                return (n - 1) * a ** (n - 2) * b * b + a ** (n - 1) * c

    return CfForms(f=f, d1=d1, d2=d2)


def normalized_sum_cf(f1: CharFunctionGrid, n: int, allow_interpolated: bool = False) -> CharFunctionGrid:
    """Characteristic function of the n-fold normalized sum: f_1(t/sqrt(n))^n.

    The argument t/sqrt(n) lands off-grid, so the analytic form is used when
    present.  Powering linearly interpolated values amplifies the sampling
    error n-fold and is refused for n > 32 unless explicitly allowed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if f1.analytic is not None:
        forms = _powered_forms(f1.analytic, n)
        t = f1.t
        return CharFunctionGrid(tmax=f1.tmax, dt=f1.dt, values=forms.f(t), analytic=forms)
    if n > 32 and not allow_interpolated:
        raise GridError("grid-only cf: powering interpolated values refused for n > 32")
    t = f1.t
    tau = t / math.sqrt(float(n))
    re = np.interp(tau, t, f1.values.real)
    im = np.interp(tau, t, f1.values.imag)
    return CharFunctionGrid(tmax=f1.tmax, dt=f1.dt, values=(re + 1j * im) ** n)


def _edge_decay(fn: CharFunctionGrid):
    """(edge magnitude, local decay exponent) of |f| near the end of the grid."""
    half = np.abs(np.asarray(fn.values)[fn.n // 2:])
    t = fn.t[fn.n // 2:]
    sup = np.maximum.accumulate(half[::-1])[::-1]  # running sup over tau >= t
    edge = float(sup[-1])
    if edge == 0.0:
        return 0.0, math.inf
    # slope of log sup over the outer decade
    hi = t[-1]
    lo = hi / 10.0
    mask = (t >= lo) & (sup > 0)
    if np.count_nonzero(mask) < 8:
        return edge, 0.0
    slope = np.polyfit(np.log(t[mask]), np.log(np.maximum(sup[mask], 1e-320)), 1)[0]
    return edge, float(-slope)


def _tail_estimate(fn: CharFunctionGrid, l: int) -> float:
    """Bound on the neglected integral of |t|^l |f(t)| beyond the grid edge."""
    edge, beta = _edge_decay(fn)
    if edge == 0.0:
        return 0.0
    if beta <= l + 1:
        return math.inf
    return 2.0 * edge * fn.tmax ** (l + 1) / (beta - (l + 1)) / (2.0 * math.pi)


def invert_cf(fn: CharFunctionGrid, l: int = 0, tail_tol: float = TAIL_TOL):
    """Fourier inversion of the cf to a density (l = 0) or derivative table (l >= 1).

    p^(l)(x) = (1/2pi) int (-it)^l e^{-itx} f(t) dt on the conjugate x-grid.
    Raises CfTailError when the cf does not decay enough at the grid edge.
    """
    if l not in (0, 1, 2):
        raise ValueError("l must be 0, 1 or 2")
    if _tail_estimate(fn, l) > tail_tol:
        raise CfTailError("cf tail too heavy; increase n or tmax")
    N = fn.n
    t = fn.t
    dx = 2.0 * math.pi / (N * fn.dt)
    x0 = fn.x0_hint if fn.x0_hint is not None else -0.5 * N * dx
    g = ((-1j * t) ** l if l else 1.0) * fn.values
    h = g * np.exp(-1j * np.arange(N) * fn.dt * x0)
    spec = np.fft.fft(h)
    x = x0 + dx * np.arange(N)
    vals = (fn.dt / (2.0 * math.pi)) * np.exp(1j * fn.tmax * x) * spec
    real = vals.real
    if l == 0:
        values, clipped = _validate(real, dx)
        if clipped > 1e-8:
            raise GridError(f"clipped mass {clipped:.3e} too large after inversion")
        outer = _check_central_tail(values, dx)
        if outer > CENTRAL_TAIL_TOL:
            raise GridError(f"density mass {outer:.3e} in outer grid region; widen x-range")
        return GridDensity(x0=x0, dx=dx, values=values, clipped_mass=clipped, source="cf")
    return GridFunction(x0=x0, dx=dx, values=real)


def density_of_normalized_sum(
    family: Family,
    n: int,
    xmax: float = DEFAULT_XMAX,
    grid_n: int = DEFAULT_N,
    derivatives: bool = True,
) -> GridDensity:
    """Density (with spectral derivative tables) of the n-fold normalized sum."""
    f1 = family_cf(family, xmax=xmax, n=grid_n)
    fn = normalized_sum_cf(f1, n)
    p = invert_cf(fn, 0)
    if not derivatives:
        return p
    d1 = invert_cf(fn, 1).values
    d2 = invert_cf(fn, 2).values
    return GridDensity(x0=p.x0, dx=p.dx, values=p.values, deriv=d1, deriv2=d2,
                       clipped_mass=p.clipped_mass, source=f"cf:{family.name}^n={n}")


def cf_from_density(p: GridDensity, out_n: int | None = None) -> CharFunctionGrid:
    """Forward transform f(t) = int e^{itx} p(x) dx on the conjugate t-grid."""
    N = p.n
    dt = 2.0 * math.pi / (N * p.dx)
    tmax = 0.5 * N * dt
    t = -tmax + dt * np.arange(N)
    a = p.values * np.exp(1j * np.arange(N) * p.dx * (-tmax))
    spec = np.fft.ifft(a) * N
    values = p.dx * np.exp(1j * t * p.x0) * spec
    # enforce exact normalization at t = 0 (fp-level correction)
    values = values / values[N // 2].real
    return CharFunctionGrid(tmax=tmax, dt=dt, values=values, x0_hint=p.x0)


def cf_derivative_at(p: GridDensity, l: int, t: np.ndarray) -> np.ndarray:
    """Spectral f^(l)(t) = int (ix)^l e^{itx} p(x) dx at arbitrary t (direct sum)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = p.x
    weights = ((1j * x) ** l if l else np.ones_like(x)) * p.values * p.dx
    return np.exp(1j * np.outer(t, x)) @ weights


def convolve(p: GridDensity, q: GridDensity) -> GridDensity:
    """Density of the sum of independent variables with densities p and q.

    Discrete convolution via transform multiplication; grids with different
    spacing are resampled to the finer one first.  Derivative tables
    propagate: (p*q)' = p' * q and (p*q)'' = p' * q' when available.
    """
    if abs(p.dx - q.dx) > 1e-12 * max(p.dx, q.dx):
        from scipy.interpolate import CubicSpline

        fine, coarse = (p, q) if p.dx <= q.dx else (q, p)
        new_x = np.arange(coarse.x0, coarse.xmax, fine.dx)
        spline = CubicSpline(coarse.x, coarse.values, extrapolate=False)
        vals = np.nan_to_num(spline(new_x), nan=0.0)
        coarse = GridDensity(x0=float(new_x[0]), dx=fine.dx, values=_validate(vals, fine.dx)[0],
                             source=coarse.source + ":resampled")
        p, q = (fine, coarse) if p.dx <= q.dx else (coarse, fine)
    dx = p.dx
    values = fftconvolve(p.values, q.values) * dx
    values, clipped = _validate(values, dx)
    d1 = d2 = None
    if p.deriv is not None:
        d1 = fftconvolve(p.deriv, q.values) * dx
        if q.deriv is not None:
            d2 = fftconvolve(p.deriv, q.deriv) * dx
    elif q.deriv is not None:
        d1 = fftconvolve(q.deriv, p.values) * dx
    return GridDensity(x0=p.x0 + q.x0, dx=dx, values=values, deriv=d1, deriv2=d2,
                       clipped_mass=clipped, source="convolution")


def standardize(p: GridDensity) -> GridDensity:
    """Affine rescaling to zero mean and unit variance (exact grid reindexing)."""
    m = p.mean()
    v = p.var()
    if v <= 0:
        raise GridError("degenerate density")
    sd = math.sqrt(v)
    d1 = p.deriv * v if p.deriv is not None else None
    d2 = p.deriv2 * v * sd if p.deriv2 is not None else None
    return GridDensity(x0=(p.x0 - m) / sd, dx=p.dx / sd, values=p.values * sd,
                       deriv=d1, deriv2=d2, clipped_mass=p.clipped_mass, source=p.source)


def decay_exponent(f1: CharFunctionGrid, window: tuple[float, float]) -> float:
    """Least-squares decay exponent of sup_{tau>=t} |f1(tau)| on a log-log window.

    The running supremum bridges oscillation zeros; the fitted slope of
    log sup against log t is returned with its sign flipped, so a value near
    1 means an envelope ~ 1/t.  A diagnostic, not a proof.
    """
    lo, hi = window
    if not 0.0 < lo < hi:
        raise ValueError("window must satisfy 0 < t_lo < t_hi")
    if hi > f1.tmax * (1 + 1e-9):
        raise ValueError("window outside grid")
    half = np.abs(np.asarray(f1.values)[f1.n // 2:])
    t = f1.t[f1.n // 2:]
    sup = np.maximum.accumulate(half[::-1])[::-1]
    mask = (t >= lo) & (t <= hi) & (sup > 0)
    if np.count_nonzero(mask) < 8:
        raise ValueError("window too narrow for the grid")
    # log-spaced subsample keeps the fit from over-weighting large t
    idx = np.unique(np.geomspace(1, np.count_nonzero(mask), 400).astype(int) - 1)
    lt = np.log(t[mask][idx])
    ls = np.log(np.maximum(sup[mask][idx], 1e-320))
    slope = np.polyfit(lt, ls, 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class WeightedCfIntegral:
    value: float
    tail: float
    verdict: str  # "finite" | "divergent"
    nu: float
    epsilon_hat: float


def weighted_cf_integral(f1: CharFunctionGrid, nu: float) -> WeightedCfIntegral:
    """Integral of |f1(t)|^nu |t| dt over the grid plus a power-law tail verdict.

    Finite verdict iff nu * epsilon_hat > 2, with epsilon_hat the fitted decay
    exponent of the envelope over the outer decade of the grid."""
    if nu <= 0:
        raise ValueError("nu must be > 0")
    t = f1.t
    absf = np.abs(np.asarray(f1.values))
    body = float(np.trapezoid(absf**nu * np.abs(t), t))
    eps = decay_exponent(f1, (f1.tmax / 100.0, f1.tmax))
    if nu * eps > 2.0:
        half = absf[f1.n // 2:]
        sup = np.maximum.accumulate(half[::-1])[::-1]
        c = float(sup[-1]) * f1.tmax**eps
        tail = 2.0 * c**nu * f1.tmax ** (2.0 - nu * eps) / (nu * eps - 2.0)
        return WeightedCfIntegral(value=body + tail, tail=tail, verdict="finite", nu=nu, epsilon_hat=eps)
    return WeightedCfIntegral(value=math.inf, tail=math.inf, verdict="divergent", nu=nu, epsilon_hat=eps)
