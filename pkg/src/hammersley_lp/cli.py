"""Command line entry point.

Subcommands: ``gen``, ``lp``, ``haar``, ``sweep``, ``verify``.  Exit status is
2 for flag errors, 1 when a verification fails and 0 otherwise.  Set
``HAMMERSLEY_LP_WORKERS`` to bound the number of integration threads.
"""
from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .discrepancy import l2_warnock, lp_cellwise, lp_monte_carlo
from .haar import coefficients_csv, verify_lemma
from .pointset import CONSTRUCTIONS, build_family, parse_shift


def dumps(obj, indent=2, _level=0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _write(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _float_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")
    if not vals or any(not v > 1 for v in vals):
        raise argparse.ArgumentTypeError("every p must be > 1")
    return vals


def _add_set_args(sp, families=CONSTRUCTIONS):
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--shift", default="zero",
                    help="zero | one | alt | random:<seed> | random-balanced:<seed> | bits:<01-string>")
    sp.add_argument("--family", default="shifted", choices=families)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hammersley-lp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="dump a point set")
    _add_set_args(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")

    sp = sub.add_parser("lp", help="L_p-discrepancy of one point set")
    _add_set_args(sp)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--method", choices=("warnock", "cellwise", "monte_carlo"), default="cellwise")
    sp.add_argument("--quad-order", type=int, default=16)
    sp.add_argument("--samples", type=int, default=10 ** 6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("haar", help="verify the Haar coefficient lemma")
    _add_set_args(sp, families=("shifted", "sym"))
    sp.add_argument("--jmax", type=int)
    sp.add_argument("--out")
    sp.add_argument("--coeff-csv")

    sp = sub.add_parser("sweep", help="sweep families x n x p")
    sp.add_argument("--families", default="zero,alt",
                    help="comma list of labels: zero, alt, random:<seed>, sym:<shift>, sym_tilde:<shift>, folded")
    sp.add_argument("--n-min", type=int, default=6)
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--p", type=_float_list, default=[2.0])
    sp.add_argument("--method", choices=("auto", "warnock", "cellwise", "monte_carlo"), default="auto")
    sp.add_argument("--samples", type=int, default=10 ** 6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--quad-order", type=int, default=16)
    sp.add_argument("--band", type=float, default=2.0)
    sp.add_argument("--out")
    sp.add_argument("--report")

    sp = sub.add_parser("verify", help="lemma, perturbation and lower-bound checks; exit 1 on failure")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--shift", default="alt")
    sp.add_argument("--jmax", type=int)
    sp.add_argument("--p", type=_float_list, default=[1.5, 2.0, 3.0, 4.0])
    sp.add_argument("--out")
    return ap


def _cmd_gen(args):
    P = build_family(args.family, args.n, args.shift)
    if args.format == "csv":
        _write(P.to_csv(), args.out)
    else:
        _write(dumps({"family": P.family, "n": P.n, "shift": str(P.shift) if P.shift else None,
                      "scale_exp": P.scale, "points": [[a, b] for a, b in zip(P.x_num, P.y_num)]}),
               args.out)
    return 0


def _cmd_lp(args):
    P = build_family(args.family, args.n, args.shift)
    if args.method == "warnock":
        if args.p != 2:
            raise ValueError("warnock is only available for p = 2")
        res = l2_warnock(P)
    elif args.method == "cellwise":
        res = lp_cellwise(P, args.p, args.quad_order)
    else:
        res = lp_monte_carlo(P, args.p, args.samples, args.seed)
    _write(dumps(res.to_dict()), args.out)
    return 0


def _cmd_haar(args):
    sigma = parse_shift(args.shift, args.n)
    jmax = args.jmax if args.jmax is not None else args.n + 2
    report = verify_lemma(args.n, sigma, jmax, family=args.family)
    _write(dumps(report.to_dict()), args.out)
    if args.coeff_csv:
        P = build_family(args.family, args.n, args.shift)
        _write(coefficients_csv(P, jmax, args.n), args.coeff_csv)
    return 0 if report.passed else 1


def _cmd_sweep(args):
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    records = ex.run_sweep(families, range(args.n_min, args.n_max + 1), args.p,
                           method=args.method, samples=args.samples, seed=args.seed,
                           quad_order=args.quad_order)
    _write(ex.records_to_csv(records), args.out)
    if args.report:
        report = {"theorems": ex.theorem_reports(records, band=args.band),
                  "lower_bound": ex.lower_bound_check(records)}
        _write(dumps(report), args.report)
    return 0


def _cmd_verify(args):
    n = args.n
    sigma = parse_shift(args.shift, n)
    jmax = args.jmax if args.jmax is not None else n + 2
    lemma = verify_lemma(n, sigma, jmax)
    lemma_sym = verify_lemma(n, sigma, jmax, family="sym")
    perturb = [ex.perturbation_check(n, sigma, p) for p in args.p]
    recs = []
    for label in (f"bits:{sigma}", f"sym:bits:{sigma}", f"sym_tilde:bits:{sigma}", "folded"):
        P = ex.family_pointset(label, n)
        recs.append(ex.SweepRecord.make(label, n, P.N, str(sigma), 0, 2.0, "warnock",
                                        l2_warnock(P).value))
    floor = ex.lower_bound_check(recs)
    ok = lemma.passed and lemma_sym.passed and all(r.passed for r in perturb) and floor["passed"]
    summary = {
        "n": n, "shift": str(sigma), "jmax": jmax, "passed": ok,
        "lemma": {"passed": lemma.passed,
                  "cases": {k: v.violations for k, v in sorted(lemma.cases.items())}},
        "lemma_sym": {"passed": lemma_sym.passed,
                      "cases": {k: v.violations for k, v in sorted(lemma_sym.cases.items())},
                      "variant_violations": lemma_sym.sym_variant_violations},
        "perturbation": [{"p": r.p, "delta": r.delta, "bound": r.bound, "passed": r.passed}
                         for r in perturb],
        "lower_bound": {"c2": floor["c2"], "min_margin": floor["min_margin"], "passed": floor["passed"]},
    }
    _write(dumps(summary), args.out)
    return 0 if ok else 1


_COMMANDS = {"gen": _cmd_gen, "lp": _cmd_lp, "haar": _cmd_haar, "sweep": _cmd_sweep, "verify": _cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
