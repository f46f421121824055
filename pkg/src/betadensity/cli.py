"""Command-line interface: density, table, check, sample, scaling.

Exit codes: 0 success, 1 a check failed, 2 invalid usage or parameters.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .bulkdensity import bulk_law
from .checks import SUITES, load_tolerances
from .ensemble import Flavor, JacobiEnsemble, LaguerreEnsemble
from .exactdensity import exact_density
from .largedev import asym_density
from .mcsampler import (density_histogram, estimate_gap_probability, estimate_max_pdf,
                        estimate_min_pdf, fit_gap_slope)
from .softedge import scaling_limit_check
from .tables import DEFAULT_NS, DEFAULT_XS, make_ensemble, ratio_table


class UsageError(ValueError):
    pass


# --- parsing helpers -----------------------------------------------------------

def parse_grid(items: Optional[Sequence[str]]) -> List[float]:
    """Values from repeatable ``--x`` items; ``a:b:step`` expands to an inclusive range."""
    out: List[float] = []
    for item in items or []:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                try:
                    a, b, step = (float(v) for v in part.split(":"))
                except ValueError:
                    raise UsageError(f"bad range {part!r}; expected a:b:step")
                if step <= 0 or b < a:
                    raise UsageError(f"bad range {part!r}; need a <= b and step > 0")
                count = int(math.floor((b - a) / step + 1e-9)) + 1
                out.extend(a + i * step for i in range(count))
            else:
                try:
                    out.append(float(part))
                except ValueError:
                    raise UsageError(f"bad number {part!r}")
    return out


def _ints(values: List[float], name: str) -> List[int]:
    if any(v != int(v) or v < 1 for v in values):
        raise UsageError(f"{name} must be positive integers")
    return [int(v) for v in values]


def _rates(args) -> tuple:
    if args.flavor == "laguerre":
        return (args.alpha,)
    return (args.alpha1, args.alpha2)


def _ensemble(args, n: int, beta: Optional[float] = None):
    try:
        return make_ensemble(args.flavor, args.beta if beta is None else beta, n, _rates(args))
    except ValueError as exc:
        raise UsageError(str(exc))


# --- output --------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) or math.isinf(v) else v
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(meta: Dict, rows: List[Dict], fmt: str) -> str:
    if fmt == "json":
        payload = {"meta": {k: _jsonable(v) for k, v in meta.items()},
                   "rows": [{k: _jsonable(v) for k, v in r.items()} for r in rows]}
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def emit(args, meta: Dict, rows: List[Dict]):
    text = render(meta, rows, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args, **extra) -> Dict:
    """Run parameters, excluding thread count and output options."""
    skip = {"threads", "out", "format", "func", "tolerances"}
    meta = {"version": __version__}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        meta[k] = ",".join(str(i) for i in v) if isinstance(v, list) else v
    meta.update(extra)
    return meta


# --- commands ------------------------------------------------------------------

def cmd_density(args) -> int:
    ns = _ints(parse_grid(args.n), "--n")
    xs = parse_grid(args.x)
    if len(ns) != 1:
        raise UsageError("density takes a single --n")
    if not xs:
        raise UsageError("density needs at least one --x")
    ens = _ensemble(args, ns[0])
    if args.regime == "exact":
        if ens.beta not in (1, 2):
            raise UsageError("exact densities need --beta 1 or 2")
        if ens.beta == 1 and ens.n % 2:
            raise UsageError("beta = 1 exact densities need even --n")
    lag = isinstance(ens, LaguerreEnsemble)
    rows = []
    for x in xs:
        arg = ens.n * x if lag else x
        row = {"x": x, "argument": arg, "regime": args.regime, "region": "", "log_density": math.nan,
               "density": math.nan, "density_display": "", "flag": ""}
        try:
            reg = ens.region(x)
            row["region"] = reg.value
            if args.regime == "exact":
                lv = exact_density(ens, arg, form=args.beta1_form)
                log = float(lv.log_abs) + (math.log(ens.n) if lag else 0.0)
            elif args.regime == "asym":
                if not reg.is_tail:
                    raise ValueError(f"asymptotic form needs x outside the support and edge band "
                                     f"(region {reg.value})")
                log = asym_density(ens, x).log_value
            else:
                if reg.value != "Bulk":
                    raise ValueError(f"bulk law needs x inside the support (region {reg.value})")
                log = math.log(ens.n * bulk_law(ens, x))
            row["log_density"] = log
            row["density"] = math.exp(log)
            row["density_display"] = format(math.exp(log), ".6g")
        except ValueError as exc:
            row["flag"] = f"rejected: {exc}"
        rows.append(row)
    emit(args, _meta(args), rows)
    return 0


def cmd_table(args) -> int:
    ns = _ints(parse_grid(args.n), "--n") if args.n else list(DEFAULT_NS)
    xs = parse_grid(args.x) if args.x else list(DEFAULT_XS[args.flavor])
    tol = load_tolerances(args.tolerances)
    key = "table_beta2" if args.beta == 2 else ("laguerre_table_beta1" if args.flavor == "laguerre"
                                                else "jacobi_table_beta1")
    if args.beta not in (1, 2):
        raise UsageError("table needs --beta 1 or 2")
    if args.beta == 1 and any(n % 2 for n in ns):
        raise UsageError("beta = 1 tables need even --n")
    table = ratio_table(args.flavor, args.beta, _rates(args), ns, xs, form=args.beta1_form,
                        tolerance=tol[key])
    rows = [{"n": c.n, "x": c.x, "ratio": c.ratio, "ratio_display": f"{c.rounded:.3f}",
             "reference": math.nan if c.reference is None else c.reference,
             "deviation": math.nan if c.deviation is None else c.deviation,
             "note": c.note} for c in table.cells]
    emit(args, _meta(args, form=table.form, tolerance=tol[key]), rows)
    return 0


def cmd_check(args) -> int:
    tol = load_tolerances(args.tolerances)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [r for name in names for r in SUITES[name](tol)]
    rows = [{"suite": r.suite, "name": r.name, "residual": r.residual, "tolerance": r.tolerance,
             "passed": r.passed} for r in results]
    ok = all(r.passed for r in results)
    emit(args, _meta(args, passed=ok), rows)
    return 0 if ok else 1


def _edges(args, ens) -> np.ndarray:
    if args.edges:
        edges = np.array(parse_grid(args.edges))
    else:
        lo, hi = ens.edges
        pad = 0.05 * (hi - lo)
        edges = np.linspace(max(lo - pad, 0.0), hi + pad if isinstance(ens, LaguerreEnsemble)
                            else min(hi + pad, 1.0), args.bins + 1)
    if len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise UsageError("--edges must be increasing with at least two values")
    return edges


def cmd_sample(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    ns = _ints(parse_grid(args.n), "--n")
    if len(ns) != 1:
        raise UsageError("sample takes a single --n")
    n = ns[0]
    extra = {}
    if args.kind == "gap":
        if args.flavor != "laguerre":
            raise UsageError("gap probabilities are defined for the Laguerre ensemble")
        if args.a is None or args.a < 0:
            raise UsageError("gap needs a fixed exponent --a >= 0")
        X = np.array(parse_grid(args.X) or parse_grid(["1:40:1"]))
        if np.any(X < 0):
            raise UsageError("--X values must be nonnegative")
        summ = estimate_gap_probability(args.beta, n, args.a, X / (4 * n), args.samples,
                                        seed=args.seed, workers=args.threads)
        rows = [{"s": s, "X": x, "count": int(c), "probability": p, "stderr": e}
                for s, x, c, p, e in zip(summ.bin_edges, X, summ.counts, summ.values,
                                         summ.standard_errors)]
        try:
            fit = fit_gap_slope(summ, n)
            extra = {"slope": fit.slope, "slope_stderr": fit.slope_error, "fit_points": fit.n_points}
        except ValueError:
            pass
    else:
        ens = _ensemble(args, n)
        edges = _edges(args, ens)
        try:
            if args.kind == "density":
                summ = density_histogram(ens, args.samples, edges, seed=args.seed, workers=args.threads)
            elif args.kind == "maxpdf":
                summ = estimate_max_pdf(ens, args.samples, edges, seed=args.seed, workers=args.threads)
            else:
                summ = estimate_min_pdf(ens, args.samples, edges, seed=args.seed, workers=args.threads)
        except ValueError as exc:
            raise UsageError(str(exc))
        rows = [{"bin_lo": lo, "bin_hi": hi, "count": int(c), "pdf": v, "stderr": e}
                for lo, hi, c, v, e in zip(edges[:-1], edges[1:], summ.counts, summ.values,
                                           summ.standard_errors)]
        extra = {"outside": int(summ.outside)}
    emit(args, _meta(args, **extra), rows)
    return 0


def cmd_scaling(args) -> int:
    ns = _ints(parse_grid(args.n), "--n") if args.n else [100, 1000, 10_000]
    X = parse_grid(args.X) if args.X else [2.0, 4.0, 6.0]
    if any(v <= 0 for v in X):
        raise UsageError("--X values must be positive")
    ens = _ensemble(args, ns[0])
    rep = scaling_limit_check(ens, X, ns)
    rows = [{"X": r.X, "n": r.n, "x": r.x, "ratio": r.ratio, "region": r.region.value,
             "flag": "edge band" if r.flagged else ""} for r in rep.rows]
    emit(args, _meta(args), rows)
    return 0


# --- argument parser -------------------------------------------------------------

def _common(p: argparse.ArgumentParser, n_required: bool = True):
    p.add_argument("--flavor", choices=[f.value for f in Flavor], default="laguerre")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=1.0, help="Laguerre rate")
    p.add_argument("--alpha1", type=float, default=5.0, help="Jacobi rate at 0")
    p.add_argument("--alpha2", type=float, default=5.0, help="Jacobi rate at 1")
    p.add_argument("--n", action="append", required=n_required,
                   help="matrix size(s); repeatable, comma lists and a:b:step ranges allowed")
    _output(p)


def _output(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--threads", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betadensity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="evaluate densities on an x grid")
    _common(p)
    p.add_argument("--x", action="append", help="points; Laguerre x is the scaled variable lambda/N")
    p.add_argument("--regime", choices=["exact", "bulk", "asym"], default="exact")
    p.add_argument("--beta1-form", choices=["exact", "nterm"], default="exact")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("table", help="ratio tables of asymptotic to exact densities")
    _common(p, n_required=False)
    p.add_argument("--x", action="append")
    p.add_argument("--beta1-form", choices=["exact", "nterm"], default="nterm",
                   help="beta = 1 exact-density convention (nterm reproduces the reference tables)")
    p.add_argument("--tolerances", help="JSON file overriding the pinned tolerances")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("check", help="run a check suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--tolerances", help="JSON file overriding the pinned tolerances")
    _output(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sample", help="Monte Carlo estimates")
    p.add_argument("kind", choices=["density", "maxpdf", "minpdf", "gap"])
    _common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--edges", action="append", help="explicit bin edges (a:b:step or lists)")
    p.add_argument("--a", type=float, help="fixed exponent for gap probabilities")
    p.add_argument("--X", action="append", help="gap grid in X = 4 N s")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("scaling", help="soft-edge scaling report")
    _common(p, n_required=False)
    p.add_argument("--X", action="append")
    p.set_defaults(func=cmd_scaling)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"betadensity {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
