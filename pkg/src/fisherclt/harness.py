"""Experiment orchestration: convergence studies, the inequality suite, and
characteristic-function diagnostics.

Convergence studies reproduce the 1/n expansion of the Fisher information
distance numerically: for each n the summand characteristic function is
powered, inverted to a density with spectral derivatives, and the measured
distance is compared with the truncated exact prediction.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coefficients import compute_coefficients
from .cumulants import analytic_cumulants
from .density import (CfTailError, GridDensity, cf_diagnostic_grid, cf_derivative_at,
                      decay_exponent, density_of_normalized_sum, convolve,
                      from_function, weighted_cf_integral, DEFAULT_N, DEFAULT_XMAX)
from .families import Family, get_family, gaussian_mixture, standardized_gamma
from .functionals import (entropic_distance, fisher_information, matched_gaussian,
                          relative_fisher, relative_fisher_integrand, total_variation_norm,
                          tv_distance, default_threshold)

_FLOAT_FMT = "{:.12g}"


@dataclass(frozen=True)
class StudyConfig:
    family: str = "standardized_exponential"
    family_params: dict = field(default_factory=dict)
    s: int = 4
    n_list: tuple = (64, 128, 256, 512)
    grid_n: int = DEFAULT_N
    xmax: float = DEFAULT_XMAX
    threshold: float | None = None
    out: str | None = None
    fmt: str = "csv"
    seed: int | None = None
    workers: int = 4
    # slowly growing part of the tail-split radius; log log n by default
    rho_n: str = "loglog"

    def __post_init__(self):
        if self.s < 2:
            raise ValueError("s must be >= 2")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be strictly increasing")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    I_rel: float
    D_rel: float
    prediction: float
    residual_scaled: float
    tail_share: float
    status: str = "ok"
    I_report: dict | None = None
    D_report: dict | None = None


def split_radius(n: int, s: int, rho: str = "loglog") -> float:
    """Radius sqrt((s-2) log n + s log log n + rho_n) separating bulk from tail."""
    if rho == "loglog":
        rho_n = math.log(max(math.log(n), 1e-9)) if n > 1 else 0.0
    else:
        rho_n = float(rho)
    val = (s - 2) * math.log(n) + s * math.log(max(math.log(n), 1e-9)) + rho_n
    return math.sqrt(max(val, 0.0))


def tail_split(p, T: float, threshold: float | None = None):
    """Split the relative-Fisher integral at |x| <= T; the two pieces add back
    to the full value exactly (same mask, same summands)."""
    x, contrib = relative_fisher_integrand(p, threshold)
    inner = np.abs(x) <= T
    J0 = float(np.sum(contrib[inner]) * p.dx)
    J1 = float(np.sum(contrib[~inner]) * p.dx)
    return J0, J1


def _study_row(cfg: StudyConfig, family: Family, coeffs, n: int) -> ConvergenceRow:
    J = (cfg.s - 2) // 2
    try:
        p = density_of_normalized_sum(family, n, xmax=cfg.xmax, grid_n=cfg.grid_n)
    except CfTailError:
        return ConvergenceRow(n=n, I_rel=math.nan, D_rel=math.nan, prediction=math.nan,
                              residual_scaled=math.nan, tail_share=math.nan,
                              status="skipped: insufficient smoothing")
    rel = relative_fisher(p, cfg.threshold)
    ent = entropic_distance(p, cfg.threshold)
    pred = coeffs.predict(n)
    residual = (rel.value - pred) * n**J
    T = split_radius(n, cfg.s, cfg.rho_n)
    J0, J1 = tail_split(p, T, cfg.threshold)
    share = J1 / (J0 + J1) if J0 + J1 > 0 else 0.0
    return ConvergenceRow(
        n=n, I_rel=rel.value, D_rel=ent.value, prediction=pred,
        residual_scaled=residual, tail_share=share,
        I_report=json.loads(rel.to_json()), D_report=json.loads(ent.to_json()),
    )


def run_convergence_study(cfg: StudyConfig) -> list[ConvergenceRow]:
    """One row per n: measured I(Z_n||Z), D(Z_n||Z), the exact-coefficient
    prediction, the scaled residual, and the tail share of the integral."""
    family = get_family(cfg.family, **cfg.family_params)
    if not family.has_cf:
        raise ValueError(f"family {family.name} has no analytic cf; cannot run a study")
    cums = analytic_cumulants(family, cfg.s) if cfg.s >= 2 else None
    coeffs = compute_coefficients(cums)
    rows: list[ConvergenceRow] = []
    with ThreadPoolExecutor(max_workers=max(1, min(cfg.workers, len(cfg.n_list)))) as pool:
        futures = [pool.submit(_study_row, cfg, family, coeffs, n) for n in cfg.n_list]
        rows = [f.result() for f in futures]
    rows.sort(key=lambda r: r.n)
    return rows


STUDY_HEADER = ["n", "I_rel", "D_rel", "prediction", "residual_scaled", "tail_share"]


def rows_to_csv(rows: list[ConvergenceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STUDY_HEADER)
    for r in rows:
        w.writerow([r.n] + [_FLOAT_FMT.format(v) for v in
                            (r.I_rel, r.D_rel, r.prediction, r.residual_scaled, r.tail_share)])
    return buf.getvalue()


def rows_to_json(rows: list[ConvergenceRow]) -> str:
    out = []
    for r in rows:
        d = {
            "n": r.n, "I_rel": r.I_rel, "D_rel": r.D_rel, "prediction": r.prediction,
            "residual_scaled": r.residual_scaled, "tail_share": r.tail_share,
            "status": r.status,
        }
        if r.I_report:
            d["I_report"] = r.I_report
            d["D_report"] = r.D_report
        out.append(d)
    return json.dumps(out, indent=2, allow_nan=True)


# ---------------------------------------------------------------------------
# inequality suite


@dataclass(frozen=True)
class CheckResult:
    name: str
    subject: str
    lhs: float
    rhs: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + self.slack

    @property
    def margin(self) -> float:
        return self.rhs + self.slack - self.lhs


@dataclass
class SuiteReport:
    checks: list

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        return json.dumps(
            [
                {"name": c.name, "subject": c.subject, "lhs": c.lhs, "rhs": c.rhs,
                 "slack": c.slack, "passed": c.passed}
                for c in self.checks
            ],
            indent=2,
        )

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name:28s} {c.subject:42s} "
                         f"lhs={c.lhs:.6g} rhs={c.rhs:.6g}")
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


SUITE_FAMILIES = ("gaussian", "standardized_exponential", "standardized_uniform")
SUITE_N = {"gaussian": (8, 32, 128), "standardized_exponential": (8, 16, 32, 64, 128, 256),
           "standardized_uniform": (8, 16, 32, 64)}


def run_inequality_suite(families=SUITE_FAMILIES, n_map=None, grid_n: int = DEFAULT_N,
                         xmax: float = DEFAULT_XMAX) -> SuiteReport:
    """Evaluate every quantitative inequality on the built-in family set."""
    n_map = dict(SUITE_N) if n_map is None else n_map
    checks: list[CheckResult] = []
    dens = {}

    for tag in families:
        fam = get_family(tag)
        for n in n_map.get(tag, (8, 64)):
            try:
                p = density_of_normalized_sum(fam, n, xmax=xmax, grid_n=grid_n)
            except CfTailError:
                continue
            dens[(tag, n)] = p
            subject = f"{tag} n={n}"
            I = fisher_information(p).value
            Irel = relative_fisher(p).value
            D = entropic_distance(p).value
            v = p.var()
            tv = total_variation_norm(p)
            checks.append(CheckResult("cramer_rao", subject, 1.0 / v, I, 1e-6))
            checks.append(CheckResult("entropy_vs_fisher", subject, D, 0.5 * v * Irel, 1e-8))
            checks.append(CheckResult("tv_vs_relative_fisher", subject,
                                      tv_distance(p, matched_gaussian(p)), 4.0 * math.sqrt(max(Irel, 0.0)), 1e-6))
            checks.append(CheckResult("tv_vs_sqrt_fisher", subject, tv, math.sqrt(I), 1e-6))
            checks.append(CheckResult("sup_vs_sqrt_fisher", subject, float(np.max(p.values)), math.sqrt(I), 1e-6))
            # cf decay |f(t)| <= sqrt(I)/|t| and |f'(t)| <= (1 + sqrt(beta2 I))/|t|
            tpts = np.linspace(0.7, 30.0, 20)
            fvals = np.abs(cf_derivative_at(p, 0, tpts))
            lhs = float(np.max(fvals * tpts))
            checks.append(CheckResult("cf_decay", subject, lhs, math.sqrt(I), 1e-6))
            beta2 = p.abs_moment(2)
            d1vals = np.abs(cf_derivative_at(p, 1, tpts))
            checks.append(CheckResult("cf_derivative_decay", subject,
                                      float(np.max(d1vals * tpts)), 1.0 + math.sqrt(beta2 * I), 1e-6))
            # moment-weighted derivative integrals, orders 1 and 2
            d = p.deriv_table()
            for s_mom in (1, 2):
                lhs = float(np.sum(np.abs(p.x) ** s_mom * np.abs(d)) * p.dx)
                rhs = math.sqrt(p.abs_moment(2 * s_mom) * I)
                checks.append(CheckResult(f"weighted_derivative_s{s_mom}", subject, lhs, rhs, 1e-6))

    # polynomial envelope (1 + x^2) p(x) <= 2 beta_1 + sqrt((1 + beta_4) I)
    for n in n_map.get("standardized_exponential", ()):
        p = dens.get(("standardized_exponential", n))
        if p is None:
            continue
        I = fisher_information(p).value
        C = 2.0 * p.abs_moment(1) + math.sqrt((1.0 + p.abs_moment(4)) * I)
        lhs = float(np.max((1.0 + p.x**2) * p.values))
        checks.append(CheckResult("envelope_s2", f"standardized_exponential n={n}", lhs, C, 1e-6))

    # monotonicity along doubling
    for tag in families:
        ns = sorted(n for (t, n) in dens if t == tag)
        for n in ns:
            if 2 * n in ns:
                checks.append(CheckResult("fisher_monotonicity", f"{tag} {n}->{2*n}",
                                          fisher_information(dens[(tag, 2 * n)]).value,
                                          fisher_information(dens[(tag, n)]).value, 1e-8))

    # Stam along independent sums
    pairs = []
    pg = from_function(get_family("gaussian").density, -14, 14, n=grid_n,
                       deriv_fn=get_family("gaussian").density_d1)
    if ("standardized_exponential", 8) in dens:
        pairs.append((pg, dens[("standardized_exponential", 8)], "N(0,1)+Z8exp"))
        pairs.append((dens[("standardized_exponential", 8)],
                      dens[("standardized_exponential", 8)], "Z8exp+Z8exp"))
    pairs.append((pg, pg, "N(0,1)+N(0,1)"))
    for pa, pb, label in pairs:
        conv = convolve(pa, pb)
        lhs = 1.0 / fisher_information(pa).value + 1.0 / fisher_information(pb).value
        rhs = 1.0 / fisher_information(conv).value
        checks.append(CheckResult("stam", label, lhs, rhs, 1e-6))

    # convexity in the density argument, and the mixture bound sum w_i / sigma_i^2
    mix_fam = gaussian_mixture((0.5, 0.5), (-1.0, 1.0), (0.5, 0.5))
    pmix = from_function(mix_fam.density, -14, 14, n=grid_n, deriv_fn=mix_fam.density_d1)
    qg = from_function(lambda x: np.exp(-0.5 * (x - 0.5) ** 2 / 4.0) / math.sqrt(8 * math.pi),
                       -20, 21, n=grid_n,
                       deriv_fn=lambda x: -((x - 0.5) / 4.0) * np.exp(-0.5 * (x - 0.5) ** 2 / 4.0) / math.sqrt(8 * math.pi))
    Ip, Iq = fisher_information(pmix).value, fisher_information(qg).value
    for alpha in np.arange(0.1, 0.95, 0.1):
        x = pmix.x
        qv = np.interp(x, qg.x, qg.values)
        qd = np.interp(x, qg.x, qg.deriv)
        vals = alpha * pmix.values + (1 - alpha) * qv
        mass = float(np.sum(vals) * pmix.dx)
        mix = GridDensity(x0=pmix.x0, dx=pmix.dx, values=vals / mass,
                          deriv=(alpha * pmix.deriv + (1 - alpha) * qd) / mass, source="mixture")
        checks.append(CheckResult("fisher_convexity", f"alpha={alpha:.1f}",
                                  fisher_information(mix).value, alpha * Ip + (1 - alpha) * Iq, 1e-6))
    # I(sum w_i N(mu_i, s_i^2)) <= sum w_i / s_i^2
    checks.append(CheckResult("mixture_fisher_bound", "0.5 N(-1,1/4) + 0.5 N(1,1/4)",
                              fisher_information(pmix).value, 0.5 / 0.25 + 0.5 / 0.25, 1e-6))

    # two-fold convolution class: |p'| <= I^{3/4} sqrt(p) and int p''^2/p <= I^2
    g4 = standardized_gamma(4)
    u = from_function(g4.density, -2.5, 30, n=grid_n, deriv_fn=g4.density_d1)
    Iu = fisher_information(u).value
    p2 = convolve(u, u)
    thr = default_threshold(p2)
    m = p2.values > thr
    lhs = float(np.max(np.abs(p2.deriv[m]) - Iu**0.75 * np.sqrt(p2.values[m])))
    checks.append(CheckResult("conv2_pointwise_derivative", "gamma4*gamma4", lhs, 0.0, 1e-6))
    ratio = float(np.sum(p2.deriv2[m] ** 2 / p2.values[m]) * p2.dx)
    checks.append(CheckResult("conv2_second_derivative", "gamma4*gamma4", ratio, Iu**2, 1e-4))

    return SuiteReport(checks=checks)


# ---------------------------------------------------------------------------
# characteristic-function criteria diagnostics


def run_smoothness_diagnostics(family, nu_grid=(0.5, 1.0, 2.0, 3.0, 4.0),
                               window=(10.0, 1000.0), tmax: float = 1200.0,
                               dt: float = 0.02, tv_n=(4, 8, 16)) -> dict:
    """Finite-Fisher-information criteria, estimated from the summand cf.

    Reports the envelope decay exponent, weighted-integral verdicts over a nu
    grid, the implied first usable n (ceil of 1/exponent), and grid total
    variations of the normalized-sum densities where inversion is possible.
    All heuristics: finite-window estimates of asymptotic statements.
    """
    fam = get_family(family) if isinstance(family, str) else family
    if not fam.has_cf:
        raise ValueError(f"family {fam.name} has no analytic cf")
    f1 = cf_diagnostic_grid(fam.cf, tmax=tmax, dt=dt)
    eps = decay_exponent(f1, window)
    report: dict = {"family": fam.name, "epsilon_hat": eps}
    report["n0_estimate"] = int(math.ceil(1.0 / eps)) if eps > 0.02 else None
    report["decay_criterion"] = eps > 0.02
    integrals = {}
    for nu in nu_grid:
        wi = weighted_cf_integral(f1, nu)
        integrals[nu] = {"value": wi.value, "verdict": wi.verdict}
    report["weighted_integrals"] = integrals
    report["integral_criterion"] = any(v["verdict"] == "finite" for v in integrals.values())
    tvs = {}
    for n in tv_n:
        try:
            p = density_of_normalized_sum(fam, n, derivatives=False)
            tvs[n] = total_variation_norm(p)
        except (CfTailError, ValueError):
            tvs[n] = None
    report["tv_of_normalized_sums"] = tvs
    return report
