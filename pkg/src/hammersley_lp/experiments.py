"""Sweeps over n, p and families; rate normalisation and theorem-level reports.

Asymptotic rate statements are turned into finite checks over the swept
n-range: "bounded" means max/min of ``N L_p / sqrt(log N)`` stays within a
band factor, "divergent" means that quantity increases strictly with n.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .discrepancy import (
    CELLWISE_MAX_N,
    WARNOCK_MAX_N,
    l2_warnock,
    lp_cellwise,
    lp_monte_carlo,
)
from .pointset import PointSet, ShiftVector, build_family, shift_balance, symmetrize, symmetrize_tilde

__all__ = [
    "SweepRecord",
    "parse_family",
    "family_pointset",
    "run_sweep",
    "records_to_csv",
    "records_from_csv",
    "fit_intercept",
    "theorem_reports",
    "perturbation_check",
    "lower_bound_constant",
    "lower_bound_check",
    "CSV_FIELDS",
]

CSV_FIELDS = ("family", "n", "N", "shift", "a_n", "p", "method", "lp_value",
              "ratio_sqrt", "ratio_log", "seed")
UNBALANCED = ("zero", "one")
MC_MAX_N = 12


def parse_family(label: str) -> tuple:
    """Split a family label into ``(construction, shift_spec)``.

    ``alt`` / ``zero`` / ``random:3`` / ``bits:0101`` are digit shifted sets;
    ``sym:<shift>`` and ``sym_tilde:<shift>`` are the symmetrized sets;
    ``folded`` and ``hammersley`` take no shift.
    """
    if label in ("folded", "hammersley"):
        return label, "zero"
    head, _, rest = label.partition(":")
    if head in ("sym", "sym_tilde", "shifted"):
        if not rest:
            raise ValueError(f"family {label!r} needs a shift, e.g. {head}:alt")
        return head, rest
    return "shifted", label


def family_pointset(label: str, n: int) -> PointSet:
    construction, shift = parse_family(label)
    return build_family(construction, n, shift)


@dataclass
class SweepRecord:
    family: str
    n: int
    N: int
    shift: str
    a_n: int
    p: float
    method: str
    lp_value: float
    ratio_sqrt: float
    ratio_log: float
    seed: Optional[int] = None

    @classmethod
    def make(cls, family, n, N, shift, a_n, p, method, value, seed=None):
        log_n = math.log(N)
        return cls(family, n, N, shift, a_n, float(p), method, value,
                   N * value / math.sqrt(log_n), N * value / log_n, seed)

    def row(self) -> list:
        out = []
        for f in CSV_FIELDS:
            v = getattr(self, f)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(format(v, ".17g"))
            else:
                out.append(str(v))
        return out


def _method_for(method: str, p: float) -> str:
    if method == "auto":
        return "warnock" if p == 2 else "cellwise"
    if method == "warnock" and p != 2:
        raise ValueError("warnock is only available for p = 2")
    return method


def _check_range(method: str, n: int):
    limit = {"warnock": WARNOCK_MAX_N, "cellwise": CELLWISE_MAX_N, "monte_carlo": MC_MAX_N}[method]
    if not 1 <= n <= limit:
        raise ValueError(f"n={n} outside 1..{limit} for method {method}")


def compute_lp(P: PointSet, p: float, method: str, samples: int = 10 ** 6,
               seed: int = 0, quad_order: int = 16) -> float:
    if method == "warnock":
        return l2_warnock(P).value
    if method == "cellwise":
        return lp_cellwise(P, p, quad_order).value
    if method == "monte_carlo":
        return lp_monte_carlo(P, p, samples, seed).value
    raise ValueError(f"unknown method {method!r}")


def run_sweep(families: Sequence[str], ns: Iterable[int], ps: Sequence[float],
              method: str = "auto", samples: int = 10 ** 6, seed: int = 0,
              quad_order: int = 16, cache: Optional[dict] = None) -> list:
    """One :class:`SweepRecord` per (family, n, p), in that nesting order.

    ``cache`` (optional dict) memoises values across calls keyed by
    ``(family, n, p, method)``.
    """
    ns = list(ns)
    plan = [(fam, n, float(p), _method_for(method, float(p)))
            for fam in families for n in ns for p in ps]
    for _, n, _, m in plan:
        _check_range(m, n)
    records = []
    for fam, n, p, m in plan:
        P = family_pointset(fam, n)
        key = (fam, n, p, m, samples if m == "monte_carlo" else None,
               seed if m == "monte_carlo" else None)
        if cache is not None and key in cache:
            value = cache[key]
        else:
            value = compute_lp(P, p, m, samples, seed, quad_order)
            if cache is not None:
                cache[key] = value
        shift = P.shift if P.shift is not None else ShiftVector.zero(n)
        a_n, _ = shift_balance(shift)
        records.append(SweepRecord.make(fam, n, P.N, str(shift), a_n, p, m, value,
                                        seed if m == "monte_carlo" else None))
    return records


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def records_from_csv(text: str) -> list:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(SweepRecord(
            row["family"], int(row["n"]), int(row["N"]), row["shift"], int(row["a_n"]),
            float(row["p"]), row["method"], float(row["lp_value"]),
            float(row["ratio_sqrt"]), float(row["ratio_log"]),
            int(row["seed"]) if row["seed"] else None))
    return out


@dataclass
class InterceptFit:
    intercept: float
    slope: float
    residual: float


def fit_intercept(ns: Sequence[int], t: Sequence[float]) -> InterceptFit:
    """Least squares fit of ``t_n**2 = a + b/n``; ``residual`` is the max abs residual."""
    ns = np.asarray(ns, dtype=float)
    t = np.asarray(t, dtype=float)
    if len(set(ns.tolist())) < 4:
        raise ValueError("need at least 4 distinct n values")
    A = np.column_stack([np.ones_like(ns), 1.0 / ns])
    y = t ** 2
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.max(np.abs(A @ np.array([a, b]) - y)))
    return InterceptFit(float(a), float(b), res)


def _group(records):
    groups = {}
    for r in records:
        groups.setdefault((r.family, r.p), []).append(r)
    for rs in groups.values():
        rs.sort(key=lambda r: r.n)
    return groups


def theorem_reports(records: Sequence[SweepRecord], band: float = 2.0,
                    reference: str = "alt", divergent: Sequence[str] = UNBALANCED) -> dict:
    """Band and trend checks over a set of records.

    * every family not in ``divergent``: max/min of ``ratio_sqrt`` over n is
      at most ``band``;
    * every family in ``divergent``: ``ratio_sqrt`` strictly increases in n;
    * for each divergent family and p, ``L_p(family) / L_p(reference)``
      strictly increases from each n to n + 2, and its last value exceeds
      its value at the first n >= 8.
    """
    groups = _group(records)
    bands, trends, contrasts = [], [], []
    for (fam, p), rs in sorted(groups.items()):
        vals = [r.ratio_sqrt for r in rs]
        ns = [r.n for r in rs]
        if fam in divergent:
            inc = all(b > a for a, b in zip(vals, vals[1:]))
            trends.append({"family": fam, "p": p, "n": ns, "ratio_sqrt": vals, "strictly_increasing": inc})
            ref = {r.n: r.lp_value for r in groups.get((reference, p), [])}
            common = [r for r in rs if r.n in ref]
            if len(common) >= 3:
                q = {r.n: r.lp_value / ref[r.n] for r in common}
                steps = [(k, q[k] > q[k - 2]) for k in sorted(q) if k - 2 in q]
                base = min((k for k in q if k >= 8), default=min(q))
                last = max(q)
                contrasts.append({
                    "family": fam, "reference": reference, "p": p,
                    "ratio": {str(k): q[k] for k in sorted(q)},
                    "step_growth": all(ok for _, ok in steps) if steps else None,
                    "last_exceeds_base": q[last] > q[base],
                    "base_n": base, "last_n": last,
                })
        else:
            ratio = max(vals) / min(vals)
            bands.append({"family": fam, "p": p, "n": ns, "min": min(vals), "max": max(vals),
                          "band": ratio, "bounded": ratio <= band})
    passed = (all(b["bounded"] for b in bands)
              and all(t["strictly_increasing"] for t in trends)
              and all(c["last_exceeds_base"] and c["step_growth"] is not False for c in contrasts))
    return {"band_threshold": band, "bounded": bands, "divergent": trends,
            "contrast": contrasts, "passed": passed}


@dataclass
class PerturbationResult:
    n: int
    shift: str
    p: float
    sym: float
    sym_tilde: float
    delta: float
    bound: float
    passed: bool


def perturbation_check(n: int, sigma: ShiftVector, p: float, tol: float = 1e-10,
                       quad_order: int = 16) -> PerturbationResult:
    """|L_p(sym_tilde) - L_p(sym)| against the bound 1/N = 2^-(n+1)."""
    a = lp_cellwise(symmetrize(n, sigma), p, quad_order).value
    b = lp_cellwise(symmetrize_tilde(n, sigma), p, quad_order).value
    delta = abs(b - a)
    bound = 2.0 ** -(n + 1)
    return PerturbationResult(n, str(sigma), float(p), a, b, delta, bound, delta <= bound + tol)


def lower_bound_constant(s: int = 2) -> float:
    """Roth's bound constant in the Hinrichs-Markhasin form, natural log."""
    return 7.0 / (27 * 2 ** (2 * s - 1) * math.log(2) ** ((s - 1) / 2) * math.sqrt(math.factorial(s - 1)))


def lower_bound_check(records: Sequence[SweepRecord]) -> dict:
    """``N L_2 >= c_2 sqrt(log N)`` for every p = 2 record."""
    c2 = lower_bound_constant(2)
    rows = []
    for r in records:
        if r.p != 2:
            continue
        margin = r.ratio_sqrt / c2
        rows.append({"family": r.family, "n": r.n, "N": r.N, "ratio_sqrt": r.ratio_sqrt,
                     "margin": margin, "holds": margin >= 1.0})
    return {"c2": c2, "records": rows,
            "min_margin": min((x["margin"] for x in rows), default=None),
            "passed": bool(rows) and all(x["holds"] for x in rows)}
