"""Command-line surface.

Subcommands: coeffs, study, inequalities, thm13, decompose.  A flat key=value
config file may supply defaults; command-line flags win.  Exit codes:
0 success, 1 usage error, 2 numerical precondition failure, 3 inequality
violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .coefficients import compute_coefficients
from .cumulants import CumulantVector, analytic_cumulants, empirical_cumulants
from .decompose import StepDensity, decompose_step_density
from .families import FAMILY_TAGS
from .harness import (StudyConfig, rows_to_csv, rows_to_json, run_convergence_study,
                      run_inequality_suite, run_smoothness_diagnostics)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_VIOLATION = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def read_config(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _merge(args, cfg: dict, key: str, cast, default):
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    if key in cfg:
        return cast(cfg[key])
    return default


def _int_list(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _write_out(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _add_common(sp):
    sp.add_argument("--config", help="flat key=value config file")
    sp.add_argument("--out", help="output path (stdout otherwise)")
    sp.add_argument("--format", dest="fmt", choices=("csv", "json"))


def build_parser() -> _Parser:
    ap = _Parser(prog="fisherclt",
                 description="Fisher information distance along the central limit theorem")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="expansion coefficient table from cumulants")
    c.add_argument("--family", choices=FAMILY_TAGS)
    c.add_argument("--gamma", help="comma list gamma_3,gamma_4,... as rationals")
    c.add_argument("--sample", help="text file, one real per line")
    c.add_argument("--s", type=int)
    c.add_argument("--seed", type=int)
    _add_common(c)

    st = sub.add_parser("study", help="convergence study for a family")
    st.add_argument("--family", choices=FAMILY_TAGS)
    st.add_argument("--s", type=int)
    st.add_argument("--n", help="comma list of n values")
    st.add_argument("--grid-N", dest="grid_n", type=int)
    st.add_argument("--xmax", type=float)
    st.add_argument("--threshold", type=float)
    st.add_argument("--workers", type=int)
    st.add_argument("--seed", type=int)
    _add_common(st)

    iq = sub.add_parser("inequalities", help="run the inequality property suite")
    iq.add_argument("--family", help="comma list of family tags")
    iq.add_argument("--n", help="comma list of n values (applied to every family)")
    iq.add_argument("--grid-N", dest="grid_n", type=int)
    iq.add_argument("--xmax", type=float)
    _add_common(iq)

    th = sub.add_parser("thm13", help="finite-Fisher-information criteria diagnostics")
    th.add_argument("--family", choices=FAMILY_TAGS)
    _add_common(th)

    de = sub.add_parser("decompose", help="step density file -> uniform mixture JSON")
    de.add_argument("--in", dest="infile", required=True, help="step density JSON")
    _add_common(de)
    return ap


def cmd_coeffs(args) -> int:
    cfg = read_config(args.config) if args.config else {}
    s = _merge(args, cfg, "s", int, 8)
    fmt = _merge(args, cfg, "fmt", str, "json")
    family = _merge(args, cfg, "family", str, None)
    gamma = _merge(args, cfg, "gamma", str, None)
    sample = _merge(args, cfg, "sample", str, None)
    if gamma:
        gs = tuple(Fraction(v) for v in gamma.split(","))
        cums = CumulantVector((Fraction(0), Fraction(1)) + gs)
    elif sample:
        with open(sample) as fh:
            data = [float(line) for line in fh if line.strip()]
        cums = empirical_cumulants(data, s)
    elif family:
        cums = analytic_cumulants(family, s)
    else:
        sys.stderr.write("error: one of --family, --gamma, --sample is required\n")
        return EXIT_USAGE
    coeffs = compute_coefficients(cums)
    if fmt == "json":
        _write_out(coeffs.to_json(), args.out)
    else:
        lines = ["j,c_j"] + [f"{j},{float(c):.12g}" for j, c in enumerate(coeffs.values, start=1)]
        _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_study(args) -> int:
    cfg = read_config(args.config) if args.config else {}
    n_raw = _merge(args, cfg, "n", str, None)
    sc = StudyConfig(
        family=_merge(args, cfg, "family", str, "standardized_exponential"),
        s=_merge(args, cfg, "s", int, 4),
        n_list=_int_list(n_raw) if n_raw else (64, 128, 256, 512),
        grid_n=_merge(args, cfg, "grid_n", int, 1 << 16),
        xmax=_merge(args, cfg, "xmax", float, 40.0),
        threshold=_merge(args, cfg, "threshold", float, None),
        fmt=_merge(args, cfg, "fmt", str, "csv"),
        seed=_merge(args, cfg, "seed", int, None),
        workers=_merge(args, cfg, "workers", int, 4),
    )
    rows = run_convergence_study(sc)
    text = rows_to_csv(rows) if sc.fmt == "csv" else rows_to_json(rows)
    _write_out(text, args.out)
    if any(r.status != "ok" for r in rows):
        sys.stderr.write("warning: some rows skipped (numerical precondition failure)\n")
        return EXIT_PRECONDITION
    return EXIT_OK


def cmd_inequalities(args) -> int:
    cfg = read_config(args.config) if args.config else {}
    fams = _merge(args, cfg, "family", str, None)
    n = _merge(args, cfg, "n", str, None)
    grid_n = _merge(args, cfg, "grid_n", int, 1 << 16)
    xmax = _merge(args, cfg, "xmax", float, 40.0)
    fmt = _merge(args, cfg, "fmt", str, "csv")
    kwargs = {}
    if fams:
        kwargs["families"] = tuple(f.strip() for f in fams.split(","))
    if n:
        ns = _int_list(n)
        kwargs["n_map"] = {f: ns for f in kwargs.get("families", ("gaussian", "standardized_exponential", "standardized_uniform"))}
    report = run_inequality_suite(grid_n=grid_n, xmax=xmax, **kwargs)
    _write_out(report.to_json() if fmt == "json" else report.summary(), args.out)
    return EXIT_OK if report.all_passed else EXIT_VIOLATION


def cmd_thm13(args) -> int:
    cfg = read_config(args.config) if args.config else {}
    family = _merge(args, cfg, "family", str, "standardized_uniform")
    report = run_smoothness_diagnostics(family)
    _write_out(json.dumps(report, indent=2, default=lambda v: None if v is math.inf else v), args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    with open(args.infile) as fh:
        step = StepDensity.from_json(fh.read())
    mixture = decompose_step_density(step)
    _write_out(mixture.to_json(), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "coeffs": cmd_coeffs,
        "study": cmd_study,
        "inequalities": cmd_inequalities,
        "thm13": cmd_thm13,
        "decompose": cmd_decompose,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        if "tail too heavy" in str(exc) or "precondition" in str(exc):
            return EXIT_PRECONDITION
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
