"""Command-line front end.

    persym census  --n N --k K [--shards S] [--shard-index I] [--out FILE] [--csv FILE]
    persym formula --i I --n N --k K
    persym verify  --n N --k K [--census FILE]
    persym rqnk    --q Q --n N --k K --method formula|closed|kernel|naive
    persym fit moments --k 9
    persym fit samples --i I --k K --max-n M [--roots 1,2,4] [--leading L] [--sample N=V ...]

Every command prints a JSON report.  Exit codes: 0 all checks pass,
1 mathematical mismatch, 2 usage error, 3 budget refusal, 4 no closed form.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import closed_forms as cf
from .engine import DEFAULT_CENSUS_BUDGET, RankDistribution, census, census_sharded
from .errors import BudgetExceeded, ConsistencyError, NoClosedForm, StructuralError
from .exact_fit import FitError, fit_rank_polynomial, solve_moment_system
from .oracle import (
    KERNEL_BUDGET_EXPONENT,
    NAIVE_BUDGET,
    SystemInstance,
    count_kernel,
    count_naive,
    lower_bounds_hold,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET, EXIT_COVERAGE = 0, 1, 2, 3, 4


def _s(x) -> str:
    return str(x)


def _poly_json(p: cf.RankPolynomial) -> dict:
    return {
        "k": p.k,
        "i": p.i,
        "coeffs": {str(e): _s(p.coeffs[e]) for e in sorted(p.coeffs, reverse=True)},
        "text": str(p),
        "source": p.source,
    }


def dist_to_json(dist: RankDistribution) -> dict:
    return {
        "n": dist.n,
        "k": dist.k,
        "gamma": [_s(g) for g in dist.gamma],
        "tuples_scanned": _s(dist.tuples_scanned),
    }


def dist_from_json(data: dict) -> RankDistribution:
    src = data.get("distribution", data)
    return RankDistribution(
        int(src["n"]), int(src["k"]), [int(g) for g in src["gamma"]], int(src["tuples_scanned"])
    )


def write_gamma_csv(dist: RankDistribution, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "gamma"])
        for i, g in enumerate(dist.gamma):
            w.writerow([i, g])


def _report(command: str, params: dict, **body) -> dict:
    out = {"command": command, "params": params}
    out.update(body)
    return out


def _cmd_census(args) -> tuple[int, dict]:
    if args.shard_index is None:
        dist = census_sharded(args.n, args.k, args.shards, workers=args.workers,
                              budget=args.budget)
    else:
        dist = census(args.n, args.k, args.shards, args.shard_index, budget=args.budget)
    if args.csv:
        write_gamma_csv(dist, args.csv)
    report = _report(
        "census",
        {"n": args.n, "k": args.k},
        gamma=[_s(g) for g in dist.gamma],
        distribution=dist_to_json(dist),
        complete=dist.complete,
        shards=dist.shards,
    )
    return EXIT_OK, report


def _cmd_formula(args) -> tuple[int, dict]:
    p = cf.gamma_poly(args.i, args.k)
    value = cf.gamma_closed(args.i, args.n, args.k).value
    return EXIT_OK, _report(
        "formula",
        {"i": args.i, "n": args.n, "k": args.k},
        value=_s(value),
        polynomial=_poly_json(p),
        anchor=p.source,
    )


def _cmd_verify(args) -> tuple[int, dict]:
    if args.census:
        dist = dist_from_json(json.loads(Path(args.census).read_text()))
        if (dist.n, dist.k) != (args.n, args.k):
            raise StructuralError(
                f"census file is for n={dist.n}, k={dist.k}, not n={args.n}, k={args.k}"
            )
    else:
        dist = census(args.n, args.k, budget=args.budget)
    checks = cf.check_closed_forms(dist) + cf.check_moment_identities(dist)
    ok = all(c.ok for c in checks)
    return (EXIT_OK if ok else EXIT_MISMATCH), _report(
        "verify",
        {"n": args.n, "k": args.k},
        gamma=[_s(g) for g in dist.gamma],
        checks=[c.as_dict() for c in checks],
        ok=ok,
    )


def _cmd_rqnk(args) -> tuple[int, dict]:
    inst = SystemInstance(args.q, args.n, args.k)
    if args.method == "formula":
        value = cf.r_formula(args.q, args.n, args.k, census(args.n, args.k, budget=args.budget)).value
    elif args.method == "closed":
        value = cf.r_closed(args.q, args.n, args.k).value
    elif args.method == "kernel":
        value = count_kernel(inst, args.kernel_budget_exponent)
    else:
        value = count_naive(inst, args.naive_budget)
    checks = [{
        "anchor": "lower bound",
        "lhs": _s(value),
        "rhs": _s(max(1 << inst.u_bits, 1 << inst.y_bits)),
        "ok": lower_bounds_hold(inst, value),
    }]
    if args.q == 1:
        r1 = cf.r1_value(args.n, args.k)
        checks.append({"anchor": "Eq 3.4", "lhs": _s(value), "rhs": _s(r1), "ok": value == r1})
    ok = all(c["ok"] for c in checks)
    return (EXIT_OK if ok else EXIT_MISMATCH), _report(
        "rqnk",
        {"q": args.q, "n": args.n, "k": args.k, "method": args.method},
        value=_s(value),
        checks=checks,
    )


def _cmd_fit_moments(args) -> tuple[int, dict]:
    sol = solve_moment_system(args.k)
    checks = []
    if sol.report.solution is not None:
        total: dict[int, Fraction] = {}
        for p in sol.polynomials.values():
            for e, c in p.coeffs.items():
                total[e] = total.get(e, Fraction(0)) + c
        total = {e: c for e, c in total.items() if c}
        checks.append({
            "anchor": "Eq 3.5",
            "lhs": str(cf.RankPolynomial(args.k, None, total)),
            "rhs": f"Y^{args.k + 1}",
            "ok": total == {args.k + 1: Fraction(1)},
        })
        for j in sorted(sol.polynomials):
            if j < 7 or not cf.covered(j, args.k):
                continue
            table = cf.gamma_poly(j, args.k)
            checks.append({
                "anchor": table.source,
                "lhs": str(sol.polynomials[j]),
                "rhs": str(table),
                "ok": sol.polynomials[j].same_polynomial(table),
            })
    ok = sol.uniqueness and all(c["ok"] for c in checks)
    return (EXIT_OK if ok else EXIT_MISMATCH), _report(
        "fit moments",
        {"k": args.k},
        uniqueness=sol.uniqueness,
        system=sol.residual_rank_report | {"equations": sol.equations},
        coefficients={f"{j},{e}": _s(c) for (j, e), c in sorted(sol.coefficients.items())},
        polynomials={str(j): _poly_json(p) for j, p in sorted(sol.polynomials.items()) if j >= 7},
        checks=checks,
    )


def _parse_sample(text: str) -> tuple[int, Fraction]:
    n, _, v = text.partition("=")
    if not _:
        raise argparse.ArgumentTypeError(f"sample {text!r} is not N=VALUE")
    return int(n), Fraction(v)


def _cmd_fit_samples(args) -> tuple[int, dict]:
    samples = []
    for n in range(args.max_n + 1):
        dist = census(n, args.k, budget=args.budget)
        samples.append((n, dist.gamma[args.i] if args.i < len(dist.gamma) else 0))
    samples.extend(args.sample or [])
    roots = [Fraction(r) for r in args.roots.split(",")] if args.roots else []
    degree = args.degree
    if degree is None:
        degree = len(samples) - 1 + (args.leading is not None)
    poly = fit_rank_polynomial(samples, degree, roots, leading=args.leading, k=args.k, i=args.i)
    checks = []
    if cf.covered(args.i, args.k):
        ref = cf.gamma_poly(args.i, args.k)
        checks.append({"anchor": ref.source, "lhs": str(poly), "rhs": str(ref),
                       "ok": poly.same_polynomial(ref)})
    ok = all(c["ok"] for c in checks)
    return (EXIT_OK if ok else EXIT_MISMATCH), _report(
        "fit samples",
        {"i": args.i, "k": args.k, "max_n": args.max_n, "roots": [_s(r) for r in roots],
         "degree": degree, "leading": None if args.leading is None else _s(args.leading)},
        samples=[[n, _s(v)] for n, v in samples],
        polynomial=_poly_json(poly),
        checks=checks,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="persym", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def budget(p):
        p.add_argument("--budget", type=int, default=DEFAULT_CENSUS_BUDGET,
                       help="max tuples per census invocation")

    p = sub.add_parser("census", help="rank histogram by exhaustive enumeration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--shard-index", type=int, default=None,
                   help="run only this shard; default runs all shards and merges")
    p.add_argument("--workers", type=int, default=1, help="processes for running shards")
    p.add_argument("--out", help="write the JSON report here as well")
    p.add_argument("--csv", help="write the gamma vector as CSV (i,gamma)")
    budget(p)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("formula", help="closed-form rank count")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_formula)

    p = sub.add_parser("verify", help="census against closed forms and moment identities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--census", help="read the distribution from a census report instead")
    p.add_argument("--out")
    budget(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("rqnk", help="number of solutions of U Y = 0")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=["formula", "closed", "kernel", "naive"], default="kernel")
    p.add_argument("--kernel-budget-exponent", type=int, default=KERNEL_BUDGET_EXPONENT)
    p.add_argument("--naive-budget", type=int, default=NAIVE_BUDGET)
    p.add_argument("--out")
    budget(p)
    p.set_defaults(func=_cmd_rqnk)

    p = sub.add_parser("fit", help="exact fitting")
    fit_sub = p.add_subparsers(dest="fit_command", required=True)
    m = fit_sub.add_parser("moments", help="solve the moment system for the high ranks")
    m.add_argument("--k", type=int, default=9)
    m.add_argument("--out")
    m.set_defaults(func=_cmd_fit_moments)
    s = fit_sub.add_parser("samples", help="fit a rank polynomial through census samples")
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--max-n", type=int, required=True)
    s.add_argument("--roots", help="comma-separated forced roots in Y")
    s.add_argument("--leading", type=Fraction, help="pin the leading coefficient")
    s.add_argument("--degree", type=int, help="degree bound in Y")
    s.add_argument("--sample", type=_parse_sample, action="append",
                   help="extra N=VALUE sample not taken from the census")
    s.add_argument("--out")
    budget(s)
    s.set_defaults(func=_cmd_fit_samples)
    return parser


def run(argv: list[str] | None = None, stdout=None) -> tuple[int, dict]:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        report = {"command": None, "error": "usage", "argv": list(argv or sys.argv[1:])}
        if code == 0:
            return code, {"command": None, "help": True}
        print(json.dumps(report, indent=2), file=stdout)
        return code, report
    start = time.perf_counter()
    try:
        code, report = args.func(args)
    except BudgetExceeded as exc:
        code, report = EXIT_BUDGET, {
            "command": args.command,
            "error": "budget",
            "message": str(exc),
            "cost": {"assignment_count": _s(exc.cost), "budget": _s(exc.budget),
                     "strategy": exc.strategy},
        }
    except NoClosedForm as exc:
        code, report = EXIT_COVERAGE, {"command": args.command, "error": "coverage",
                                       "message": str(exc)}
    except FitError as exc:
        code = EXIT_MISMATCH if exc.report.status == "inconsistent" else EXIT_USAGE
        report = {"command": args.command, "error": "fit", "message": str(exc),
                  "system": exc.report.summary()}
    except ConsistencyError as exc:
        code, report = EXIT_MISMATCH, {"command": args.command, "error": "consistency",
                                       "message": str(exc)}
    except (StructuralError, ValueError) as exc:
        code, report = EXIT_USAGE, {"command": args.command, "error": "usage",
                                    "message": str(exc)}
    report["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    text = json.dumps(report, indent=2)
    print(text, file=stdout)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    return code, report


def main(argv: list[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
