"""Command-line interface.

Every command builds one JSON document ``{"manifest", "theta", "result"}``
and optionally a CSV with a header row.  The manifest holds everything
needed to rerun the command; wall-clock time goes to a sidecar file
(``<json>.timing.json``) so reruns produce byte-identical artifacts.

Exit codes: 0 success, 2 invalid flags, 3 enumeration budget exceeded,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .alphabet import Theta, ThetaError, from_probs, geometric, uniform
from .exact_dist import BudgetExceeded, DistTable, enumerate_distribution, theorem31_pmf
from .zero_words import p_zero

log = logging.getLogger("selfoverlap")

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY = 0, 2, 3, 4
NOT_FLAGS = {"func", "json", "csv", "out_dir", "verbose", "command"}


class UsageError(Exception):
    pass


def _num(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


# ---------------------------------------------------------------------------
# argument handling


def _budget(text: str) -> int:
    try:
        value = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def theta_from_args(args, required: bool = True) -> Theta | None:
    exact = True if args.rational else False if args.float else None
    if args.theta is not None:
        parts = [p.strip() for p in args.theta.split(",") if p.strip()]
        return from_probs(parts, exact=exact)
    if args.uniform is not None:
        return uniform(args.uniform, exact=exact is not False)
    if args.geometric is not None:
        return geometric(args.geometric, eps=args.trunc_eps, exact=exact is not False)
    return uniform(2, exact=exact is not False) if required else None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("letter distribution")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--theta", help="comma-separated letter probabilities, e.g. 0.7,0.3 or 1/2,1/3,1/6")
    src.add_argument("--uniform", type=int, metavar="S", help="uniform law on S letters")
    src.add_argument("--geometric", metavar="R", help="geometric law p_a = (1-R) R^a, truncated")
    g.add_argument("--trunc-eps", default="1e-12", help="drop geometric letters once the remaining mass is <= this")
    m = p.add_mutually_exclusive_group()
    m.add_argument("--rational", action="store_true", help="force exact rational arithmetic")
    m.add_argument("--float", action="store_true", help="force floating point")
    o = p.add_argument_group("output")
    o.add_argument("--json", metavar="PATH", help="write the JSON document here ('-' for stdout)")
    o.add_argument("--csv", metavar="PATH", help="write the CSV table here ('-' for stdout)")
    p.add_argument("--budget", type=_budget, default=None, help="max words per enumeration (default 1e8 or $SELFOVERLAP_BUDGET)")
    p.add_argument("--threads", type=_positive, default=1, help="worker threads; never changes results")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="selfoverlap", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="law of S_n for one word length")
    p.add_argument("--n", type=_positive, required=True)
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--exact", action="store_true")
    how.add_argument("--mc", action="store_true", help="Monte Carlo estimate")
    p.add_argument("--method", choices=["enumeration", "theorem31"], default="enumeration")
    p.add_argument("--samples", type=_positive, default=100_000)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("limit", parents=[common], help="limiting law of S_n with certified truncation")
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--terms", type=_positive, default=None, help="fixed truncation length instead of --tol")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("zero", parents=[common], help="P(S_n = 0) sequence, its limit and lower bound")
    p.add_argument("--n-max", type=_positive, default=20)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_zero)

    p = sub.add_parser("count", parents=[common], help="exact number of unbordered words")
    p.add_argument("--n-max", type=_positive, required=True)
    p.add_argument("--s", type=int, default=2, help="alphabet size")
    p.add_argument("--brute-max", type=int, default=0, help="also count by enumeration up to this length")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bounds", parents=[common], help="convergence-speed and correction-term bounds")
    p.add_argument("--kind", choices=["velocity", "correction", "leadterm"], default="velocity")
    p.add_argument("--grid", type=int, default=14, metavar="N_MAX", help="largest word length on the grid")
    p.add_argument("--k-max", type=int, default=10, help="leadterm: largest k")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("coupling", parents=[common], help="P(S_{n+1} = S_n + 1) on nested prefixes")
    p.add_argument("--n", type=_positive, required=True)
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--exact", action="store_true")
    how.add_argument("--mc", action="store_true")
    p.add_argument("--samples", type=_positive, default=100_000)
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("verify", parents=[common], help="run the property suite")
    lvl = p.add_mutually_exclusive_group()
    lvl.add_argument("--quick", action="store_true", help="property suite, n <= 10 (default)")
    lvl.add_argument("--full", action="store_true", help="everything, n <= 14")
    p.add_argument("--only", nargs="*", help="run checks whose name contains one of these")
    p.add_argument("--out-dir", default=".", help="where verify_<profile>.json/.md go")
    p.set_defaults(func=cmd_verify)
    return ap


# ---------------------------------------------------------------------------
# emission


def manifest(args, theta: Theta | None) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in NOT_FLAGS}
    return {
        "command": args.command,
        "flags": flags,
        "theta": theta.to_json() if theta is not None else None,
        "mode": theta.mode if theta is not None else None,
        "seed": args.seed,
        "version": __version__,
    }


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def emit(args, theta, result: dict, rows=None, started: float | None = None) -> None:
    doc = {"manifest": manifest(args, theta), "theta": theta.to_json() if theta is not None else None, "result": result}
    text = json.dumps(doc, indent=2, default=_num) + "\n"
    if args.json is None and args.csv is None:
        _write("-", text)
    if args.json is not None:
        _write(args.json, text)
        if args.json != "-" and started is not None:
            side = {"wall_clock_s": round(time.perf_counter() - started, 3), "finished": datetime.now(timezone.utc).isoformat()}
            Path(args.json + ".timing.json").write_text(json.dumps(side, indent=2) + "\n", encoding="utf-8")
    if args.csv is not None and rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        _write(args.csv, buf.getvalue())


# ---------------------------------------------------------------------------
# commands


def cmd_dist(args) -> int:
    t0 = time.perf_counter()
    theta = theta_from_args(args)
    n = args.n
    if args.mc:
        from .montecarlo import McConfig, sample_distribution

        cfg = McConfig(n=n, samples=args.samples, seed=args.seed, theta=theta, threads=args.threads)
        res = sample_distribution(cfg)
        table = DistTable(n=n, pmf=res.pmf, mode="float", producer="montecarlo", stderr=res.stderr)
        result = {**table.to_json(), "counts": res.counts, "samples": res.samples, "config": cfg.echo()}
        rows = [("k", "probability", "stderr")] + [(k, repr(p), repr(e)) for k, (p, e) in enumerate(zip(res.pmf, res.stderr))]
        emit(args, theta, result, rows, t0)
        return EXIT_OK
    if args.method == "enumeration":
        table = enumerate_distribution(n, theta, budget=args.budget, threads=args.threads)
    else:
        # the closed forms cover k <= n/2; longer overlaps come from enumeration
        base = enumerate_distribution(n, theta, budget=args.budget, threads=args.threads)
        pmf = list(base.pmf)
        if n >= 2:
            pmf[0] = p_zero(n, theta, budget=args.budget)
        for k in range(1, n // 2 + 1):
            pmf[k] = theorem31_pmf(n, k, theta, budget=args.budget)
        table = DistTable(n=n, pmf=pmf, mode=base.mode, producer="theorem31")
    table.check()
    emit(args, theta, table.to_json(), list(table.csv_rows()), t0)
    return EXIT_OK


def cmd_limit(args) -> int:
    from .limit_series import limit_pmf

    t0 = time.perf_counter()
    theta = theta_from_args(args)
    if args.k_max < 0:
        raise UsageError("--k-max must be >= 0")
    out, rows = [], [("k", "limit_pmf", "tail_bound", "certified")]
    for k in range(0, args.k_max + 1):
        s = limit_pmf(k, theta, tol=args.tol, terms=args.terms, budget=args.budget, threads=args.threads)
        if not s.reached_tol:
            log.warning("k=%d: tolerance %g not reached, tail bound %.3g", k, args.tol, float(s.tail_bound))
        out.append({"k": k, **s.to_json()})
        rows.append((k, repr(float(s.value)), repr(float(s.tail_bound)), int(s.reached_tol)))
    emit(args, theta, {"rows": out}, rows, t0)
    return EXIT_OK


def cmd_zero(args) -> int:
    from .zero_words import limit_zero, zero_bound_margin, zero_lower_bound, zero_recursion

    t0 = time.perf_counter()
    theta = theta_from_args(args)
    seq = zero_recursion(args.n_max, theta, budget=args.budget)
    seq.check()
    lim = limit_zero(theta, tol=args.tol, budget=args.budget, threads=args.threads)
    result = {
        "sequence": {str(n): _num(v) for n, v in seq.values.items()},
        "limit": lim.to_json(),
        "lower_bound": float(zero_lower_bound(theta)),
        "margin": float(zero_bound_margin(lim, theta)),
    }
    rows = [("n", "p_zero")] + [(n, _num(v) if isinstance(v, Fraction) else repr(float(v))) for n, v in seq.values.items()]
    emit(args, theta, result, rows, t0)
    return EXIT_OK


def cmd_count(args) -> int:
    from .exact_dist import count_by_overlap
    from .zero_words import unbordered_count

    t0 = time.perf_counter()
    if args.s < 2:
        raise UsageError("--s must be >= 2")
    u = unbordered_count(args.n_max, args.s)
    result = {"s": args.s, "counts": [str(c) for c in u]}
    if args.brute_max:
        brute = [count_by_overlap(n, args.s, budget=args.budget)[0] if n > 1 else args.s for n in range(1, args.brute_max + 1)]
        result["brute"] = brute
        result["agree"] = all(b == c for b, c in zip(brute, u))
    rows = [("n", "unbordered")] + [(n, c) for n, c in enumerate(u, start=1)]
    emit(args, None, result, rows, t0)
    return EXIT_OK


def cmd_bounds(args) -> int:
    from . import bounds
    from .verify import default_thetas

    t0 = time.perf_counter()
    given = theta_from_args(args, required=False)
    thetas = [given] if given is not None else default_thetas()
    if args.kind == "velocity":
        rep = bounds.velocity_report(thetas, n_max=args.grid, tol=args.tol, budget=args.budget)
        result = rep.to_json()
        rows = [("theta", "n", "k", "measured", "series_error", "bound", "ratio")]
        rows += [(c.theta, c.n, c.k, repr(c.measured), repr(c.series_error), repr(c.bound), repr(c.ratio)) for c in rep.cells]
    elif args.kind == "correction":
        cells, rows = [], [("theta", "n", "k", "bound", "lhs", "rhs", "status")]
        for th in thetas:
            for n in range(2, args.grid + 1):
                for k in range(1, n // 2 + 1):
                    checks = bounds.correction_check(k, n, th, tol=args.tol, budget=args.budget)
                    checks += bounds.specialization_check(k, n, th, tol=args.tol, budget=args.budget)
                    for c in checks:
                        cells.append({"theta": str(th), "n": n, "k": k, **vars(c)})
                        rows.append((str(th), n, k, c.name, repr(c.lhs), repr(c.rhs), c.status))
        result = {"cells": cells, "violated": sum(c["status"] == "violated" for c in cells)}
    else:
        reps = [bounds.leadterm_analysis(th, args.k_max, tol=args.tol, budget=args.budget) for th in thetas]
        result = {"reports": [r.to_json() for r in reps]}
        rows = [("theta", "k", "m2k", "sandwich_lower", "upper", "strict_upper", "certified")]
        for th, r in zip(thetas, reps):
            rows += [(str(th), x.k, repr(float(x.m2k)), repr(float(x.lower)), repr(float(x.upper)), repr(float(x.strict_upper)), int(x.certified_m2k_above)) for x in r.rows]
    emit(args, given, result, rows, t0)
    return EXIT_OK


def cmd_coupling(args) -> int:
    from .montecarlo import McConfig, step_coupling

    t0 = time.perf_counter()
    theta = theta_from_args(args)
    fin = theta.finite()
    if args.exact:
        v = step_coupling(args.n, theta, "exact", budget=args.budget)
        result = {"n": args.n, "mode": "exact", "value": _num(v), "value_float": float(v)}
    else:
        cfg = McConfig(n=args.n, samples=args.samples, seed=args.seed, theta=theta, threads=args.threads)
        p, se = step_coupling(args.n, theta, "sampled", cfg=cfg)
        result = {"n": args.n, "mode": "sampled", "value": p, "stderr": se, "config": cfg.echo()}
    result["m2"] = float(fin.moment(2))
    result["rho"] = float(fin.rho)
    rows = [("n", "value", "m2", "rho"), (args.n, result["value"], result["m2"], result["rho"])]
    emit(args, theta, result, rows, t0)
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import verify

    t0 = time.perf_counter()
    profile = verify.FULL if args.full else verify.QUICK
    rep = verify.run(profile, only=args.only)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"manifest": manifest(args, None), "report": rep.to_json()}
    (out / f"verify_{profile.name}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    (out / f"verify_{profile.name}.md").write_text(rep.markdown(), encoding="utf-8")
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.cases} cases, {c.seconds:.2f} s)")
    print(f"{'PASS' if rep.passed else 'FAIL'}  overall ({time.perf_counter() - t0:.2f} s)")
    return EXIT_OK if rep.passed else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"selfoverlap: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ThetaError, UsageError, ValueError) as e:
        print(f"selfoverlap: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
