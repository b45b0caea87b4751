"""Exact Haar coefficients of the local discrepancy and the lemma checks built on them.

For a point set with ``N = 2**nu`` points the coefficient separates as

    mu_{j,m} = (1/N) sum_k F_{j1,m1}(x_k) F_{j2,m2}(y_k) - G(j1) G(j2)

with ``F_{j,m}(x) = int_0^1 1[t > x] h_{j,m}(t) dt`` (:func:`survivor_integral`)
and ``G(j) = int_0^1 t h_{j,m}(t) dt`` (:func:`monomial_integral`).
``F_{j,m}`` vanishes unless ``x`` lies in ``I_{j,m}``, so for a fixed shape
``j`` every point feeds exactly one box and all boxes without points share
the value ``-G(j1) G(j2)``.  :func:`shape_table` exploits this to produce a
whole shape in O(N) exact integer operations.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .numerics import Dyadic, HALF
from .pointset import PointSet, ShiftVector, shift_balance, shifted_hammersley, symmetrize

__all__ = [
    "HaarIndex",
    "HaarCoefficient",
    "ShapeTable",
    "CaseStats",
    "LemmaReport",
    "SquareFunctionResult",
    "ChainBound",
    "survivor_integral",
    "monomial_integral",
    "haar_coefficient",
    "shape_table",
    "classify_lemma_case",
    "lemma_cases",
    "verify_lemma",
    "square_function_lp",
    "square_function_tail",
    "chain_bound_sum",
]


@dataclass(frozen=True)
class HaarIndex:
    j1: int
    j2: int
    m1: int = 0
    m2: int = 0

    def __post_init__(self):
        for j, m in ((self.j1, self.m1), (self.j2, self.m2)):
            if j < -1:
                raise ValueError(f"level {j} < -1")
            top = 1 if j == -1 else 1 << j
            if not 0 <= m < top:
                raise ValueError(f"m={m} not in D_{j}")

    @property
    def level(self) -> int:
        """|j| = max(0, j1) + max(0, j2)."""
        return max(0, self.j1) + max(0, self.j2)


@dataclass(frozen=True)
class HaarCoefficient:
    index: HaarIndex
    mu: Dyadic


def _check_jm(j, m):
    if j < -1:
        raise ValueError(f"level {j} < -1")
    if not 0 <= m < (1 if j == -1 else 1 << j):
        raise ValueError(f"m={m} not in D_{j}")


def survivor_integral(x, j: int, m: int) -> Dyadic:
    """``int_0^1 1[t > x] h_{j,m}(t) dt`` for ``x`` in [0, 1].

    The midpoint of ``I_{j,m}`` belongs to the right (negative) half.
    """
    _check_jm(j, m)
    x = Dyadic.coerce(x)
    if j == -1:
        return 1 - x
    left = Dyadic(m, j)
    right = Dyadic(m + 1, j)
    if x < left or not x < right:
        return Dyadic()
    mid = Dyadic(2 * m + 1, j + 1)
    if x < mid:
        return left - x
    return x - right


def monomial_integral(j: int) -> Dyadic:
    """``int_0^1 t h_{j,m}(t) dt``; independent of m."""
    if j < -1:
        raise ValueError(f"level {j} < -1")
    if j == -1:
        return HALF
    return Dyadic(-1, 2 * j + 2)


def haar_coefficient(P: PointSet, idx: HaarIndex) -> HaarCoefficient:
    acc = Dyadic()
    for x, y in P.points:
        fx = survivor_integral(x, idx.j1, idx.m1)
        if fx:
            acc = acc + fx * survivor_integral(y, idx.j2, idx.m2)
    mu = acc * Dyadic(1, P.log2_N) - monomial_integral(idx.j1) * monomial_integral(idx.j2)
    return HaarCoefficient(idx, mu)


def _axis(nums, scale, j):
    """Per point: (box index or None, F scaled by 2**S, interior flag) and S."""
    top = 1 << scale
    if j == -1:
        return [(0, top - v, 0 < v < top) if v < top else (0, 0, False) for v in nums], scale
    S = max(scale, j + 1)
    up = S - scale
    width = 1 << (S - j)
    half = width >> 1
    out = []
    for v in nums:
        if v >= top:
            out.append((None, 0, False))
            continue
        X = v << up
        m = X // width
        r = X - m * width
        out.append((m, -r if r < half else r - width, r > 0))
    return out, S


@dataclass
class ShapeTable:
    """All coefficients of one shape ``(j1, j2)``.

    ``values`` holds every box that contains a point (half-open sense);
    every other box equals ``default``.  ``interior`` lists boxes whose
    open interior contains a point.
    """

    j1: int
    j2: int
    default: Dyadic
    values: dict
    interior: set

    @property
    def level(self) -> int:
        return max(0, self.j1) + max(0, self.j2)

    @property
    def n_boxes(self) -> int:
        return 1 << self.level

    @property
    def n_default(self) -> int:
        return self.n_boxes - len(self.values)

    def get(self, m1: int, m2: int) -> Dyadic:
        return self.values.get((m1, m2), self.default)

    def iter_all(self):
        """Yield ``((m1, m2), mu)`` for every box in row-major order."""
        n1 = 1 if self.j1 == -1 else 1 << self.j1
        n2 = 1 if self.j2 == -1 else 1 << self.j2
        for m1 in range(n1):
            for m2 in range(n2):
                yield (m1, m2), self.values.get((m1, m2), self.default)


def shape_table(P: PointSet, j1: int, j2: int) -> ShapeTable:
    nu = P.log2_N
    ax, s1 = _axis(P.x_num, P.scale, j1)
    ay, s2 = _axis(P.y_num, P.scale, j2)
    acc = {}
    interior = set()
    for (m1, f1, in1), (m2, f2, in2) in zip(ax, ay):
        if m1 is None or m2 is None:
            continue
        key = (m1, m2)
        acc[key] = acc.get(key, 0) + f1 * f2
        if in1 and in2:
            interior.add(key)
    default = -(monomial_integral(j1) * monomial_integral(j2))
    e = s1 + s2 + nu
    values = {k: Dyadic(v, e) + default for k, v in acc.items()}
    return ShapeTable(j1, j2, default, values, interior)


def lemma_cases(j1: int, j2: int, n: int) -> tuple:
    """All cases of the coefficient lemma whose hypotheses hold for shape (j1, j2)."""
    if j1 == -1 and j2 == -1:
        return ("vi",)
    if j1 == -1 or j2 == -1:
        k = j2 if j1 == -1 else j1
        return ("iv",) if k < n else ("v",)
    cases = []
    if j1 + j2 < n - 1:
        cases.append("i")
    if j1 + j2 >= n - 1 and j1 <= n and j2 <= n:
        cases.append("ii")
    if j1 >= n or j2 >= n:
        cases.append("iii")
    return tuple(cases)


def classify_lemma_case(idx, n: int) -> str:
    """Primary case tag; shapes with ``j_i = n`` satisfy (ii) and (iii) and report ``ii``.

    :func:`verify_lemma` checks the predicates of every case in :func:`lemma_cases`.
    """
    if isinstance(idx, HaarIndex):
        j1, j2 = idx.j1, idx.j2
    else:
        j1, j2 = idx[0], idx[1]
    return lemma_cases(j1, j2, n)[0]


_KINDS = {
    "i": "exact_equality",
    "ii": "upper_bound",
    "iii": "exact_equality",
    "iv": "upper_bound",
    "v": "exact_equality",
    "vi": "exact_equality",
}


@dataclass
class CaseStats:
    case: str
    kind: str
    count: int = 0
    violations: int = 0
    max_abs_mu: Dyadic = field(default_factory=Dyadic)
    interior_empty: int = 0
    max_exceptional: int = 0
    flags: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def _fail(self, j1, j2, m, expected, actual, what):
        self.violations += 1
        if len(self.failures) < 20:
            self.failures.append({
                "j": [j1, j2], "m": list(m) if m is not None else None,
                "check": what, "expected": str(expected), "actual": str(actual),
            })

    def to_dict(self) -> dict:
        d = {
            "case": self.case,
            "kind": self.kind,
            "count": self.count,
            "violations": self.violations,
            "max_abs_mu": str(self.max_abs_mu),
        }
        if self.case == "ii":
            d["interior_empty"] = self.interior_empty
            d["max_exceptional_per_shape"] = self.max_exceptional
        if self.flags:
            d["flags"] = self.flags
        if self.failures:
            d["failures"] = self.failures
        return d


@dataclass
class LemmaReport:
    n: int
    shift: str
    family: str
    jmax: int
    cases: dict
    sym_variant_violations: int = 0

    @property
    def passed(self) -> bool:
        return (all(c.violations == 0 for c in self.cases.values())
                and self.sym_variant_violations == 0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "shift": self.shift,
            "family": self.family,
            "jmax": self.jmax,
            "passed": self.passed,
            "sym_variant_violations": self.sym_variant_violations,
            "cases": [self.cases[k].to_dict() for k in sorted(self.cases, key=_case_order)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _case_order(tag):
    return ("i", "ii", "iii", "iv", "v", "vi").index(tag)


def _pow2(e: int) -> Dyadic:
    """2**e for any integer e (negative e gives a fraction)."""
    return Dyadic(1, -e) if e <= 0 else Dyadic(1 << e, 0)


def _expected(case, j1, j2, n, a_n, sym):
    lvl = max(0, j1) + max(0, j2)
    if case == "i":
        return _pow2(-2 * (n + 1))
    if case == "ii":
        return _pow2(-(n + lvl + 1))
    if case == "iii":
        return _pow2(-2 * (lvl + 2))
    k = j2 if j1 == -1 else j1
    if case == "iv":
        return _pow2(-(n + k))
    if case == "v":
        return _pow2(-(2 * k + 3))
    if sym:
        return _pow2(-(n + 1)) + _pow2(-2 * (n + 1))
    return Dyadic(2 * a_n + 4 - n, n + 3) + _pow2(-2 * (n + 1))


def verify_lemma(n: int, sigma: ShiftVector, jmax: Optional[int] = None,
                 family: str = "shifted") -> LemmaReport:
    """Check every Haar coefficient with ``j1, j2 <= jmax`` against the lemma.

    ``family="shifted"`` checks the digit shifted set: equalities for cases
    (i), (iii), (v), (vi); the bound of (iv); for (ii) the bound on every box,
    equality on interior-empty boxes, and at most ``2**n`` boxes per shape
    off the equality value.

    ``family="sym"`` checks the symmetrized set: the (-1,-1) equality, the
    same values as upper bounds elsewhere (at most ``2**(n+1)`` boxes per
    shape off the (ii) equality value, one set per half), and
    ``|mu_sym| <= max(|mu_sigma|, |mu_sigma*|)`` box by box.
    All comparisons are exact.
    """
    if jmax is None:
        jmax = n + 2
    if family not in ("shifted", "sym"):
        raise ValueError("family must be 'shifted' or 'sym'")
    sym = family == "sym"
    a_n, _ = shift_balance(sigma)
    P = symmetrize(n, sigma) if sym else shifted_hammersley(n, sigma)
    halves = (shifted_hammersley(n, sigma), shifted_hammersley(n, sigma.complement())) if sym else ()
    exceptional_cap = (2 if sym else 1) << n
    stats = {}
    variant_bad = 0
    for j1 in range(-1, jmax + 1):
        for j2 in range(-1, jmax + 1):
            table = shape_table(P, j1, j2)
            entries = list(table.values.items())
            n_def = table.n_default
            for case in lemma_cases(j1, j2, n):
                kind = _KINDS[case]
                if sym and case != "vi":
                    kind = "upper_bound"
                st = stats.setdefault(case, CaseStats(case, kind))
                _check_shape(st, case, kind, table, entries, n_def,
                             _expected(case, j1, j2, n, a_n, sym),
                             _pow2(-2 * (table.level + 2)), exceptional_cap)
            if sym and (j1, j2) != (-1, -1):
                variant_bad += _check_variants(table, [shape_table(H, j1, j2) for H in halves])
    return LemmaReport(n, str(sigma), family, jmax, stats, variant_bad)


def _check_shape(st, case, kind, table, entries, n_def, expected, eq_value, exceptional_cap):
    j1, j2 = table.j1, table.j2
    st.count += table.n_boxes
    mx = max([abs(v) for _, v in entries] + ([abs(table.default)] if n_def else []))
    if st.max_abs_mu < mx:
        st.max_abs_mu = mx

    def each():
        for key, v in entries:
            yield key, v
        if n_def:
            yield None, table.default

    if case == "vi":
        for key, v in each():
            if v != expected:
                st._fail(j1, j2, key, expected, v, "mu == closed form")
        return
    if case == "ii":
        exceptional = 0
        for key, v in each():
            a = abs(v)
            mult = n_def if key is None else 1
            occupied = key is not None and key in table.interior
            if a > expected:
                if occupied:
                    st._fail(j1, j2, key, expected, a, "|mu| <= 2^-(n+|j|+1)")
                else:
                    st.flags.append({"j": [j1, j2], "m": key,
                                     "note": "bound fails off the exceptional set"})
            if not occupied:
                st.interior_empty += mult
                if a != eq_value:
                    st._fail(j1, j2, key, eq_value, a, "|mu| == 2^-2(|j|+2) on interior-empty box")
            if a != eq_value:
                exceptional += mult
        st.max_exceptional = max(st.max_exceptional, exceptional)
        if exceptional > exceptional_cap:
            st._fail(j1, j2, None, exceptional_cap, exceptional, "exceptional boxes per shape")
        return
    for key, v in each():
        a = abs(v)
        bad = a != expected if kind == "exact_equality" else a > expected
        if bad:
            st._fail(j1, j2, key, expected, a,
                     "|mu| == value" if kind == "exact_equality" else "|mu| <= bound")


def _check_variants(table, variants) -> int:
    """Count boxes where ``|mu_sym|`` exceeds both shifted halves' ``|mu|``."""
    keys = set(table.values)
    for t in variants:
        keys.update(t.values)
    bad = 0
    for key in keys:
        if abs(table.get(*key)) > max(abs(t.get(*key)) for t in variants):
            bad += 1
    if len(keys) < table.n_boxes and abs(table.default) > max(abs(t.default) for t in variants):
        bad += table.n_boxes - len(keys)
    return bad


def coefficient_rows(P: PointSet, jmax: int, n: int, limit: int = 1 << 20):
    """Rows ``j1,j2,m1,m2,mu_num,mu_exp,case,interior_empty`` for every coefficient."""
    total = sum(1 << (max(0, a) + max(0, b))
                for a in range(-1, jmax + 1) for b in range(-1, jmax + 1))
    if total > limit:
        raise ValueError(f"{total} coefficients exceed the dump limit {limit}")
    for j1 in range(-1, jmax + 1):
        for j2 in range(-1, jmax + 1):
            table = shape_table(P, j1, j2)
            case = lemma_cases(j1, j2, n)[0]
            for (m1, m2), mu in table.iter_all():
                yield (j1, j2, m1, m2, mu.mantissa, mu.exponent, case,
                       int((m1, m2) not in table.interior))


def coefficients_csv(P: PointSet, jmax: int, n: int, limit: int = 1 << 20) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j1", "j2", "m1", "m2", "mu_num", "mu_exp", "case", "interior_empty"])
    w.writerows(coefficient_rows(P, jmax, n, limit))
    return buf.getvalue()


def _g_sq(j: int) -> Fraction:
    # 2^{2 max(0,j)} G(j)^2
    return Fraction(1, 4) if j == -1 else Fraction(1, 1 << (2 * j + 4))


def square_function_tail(J: int) -> Fraction:
    """Exact pointwise value of the omitted part of ``S^2`` for shapes with max(j1, j2) > J.

    Valid when every coordinate is a multiple of ``2**-J``: every omitted
    coefficient is then ``-G(j1) G(j2)``.
    """
    full = Fraction(1, 3)  # 1/4 + sum_{j>=0} 2^{-2j-4}
    part = sum((_g_sq(j) for j in range(-1, J + 1)), Fraction(0))
    return full * full - part * part


@dataclass
class SquareFunctionResult:
    value: float
    stderr: float
    tail: float
    value_with_tail: float
    J: int
    p: float
    samples: int


def _shape_lookup(table: ShapeTable):
    """Sorted linear keys and float values of ``2^{2|j|} mu^2`` for one shape."""
    w = 1 if table.j2 == -1 else 1 << table.j2
    scale = float(1 << (2 * table.level))
    items = sorted(((m1 * w + m2), float(v) ** 2 * scale) for (m1, m2), v in table.values.items())
    keys = np.array([k for k, _ in items], dtype=np.int64)
    vals = np.array([v for _, v in items], dtype=np.float64)
    return keys, vals, float(table.default) ** 2 * scale


def square_function_lp(P: PointSet, p: float, J: Optional[int] = None,
                       samples: int = 200_000, seed: int = 0) -> SquareFunctionResult:
    """Monte Carlo estimate of ``||S(D_N)||_p`` with the Haar sum cut at ``j1, j2 <= J``.

    Returns the truncated estimate, its delta-method standard error, and
    the exact constant ``tail`` that the omitted shapes add to ``S^2``.
    """
    n = P.n or P.scale
    if J is None:
        J = n + 2
    if J < n or J < P.scale:
        raise ValueError(f"J={J} must be >= n={n}")
    p = float(p)
    if not p > 1:
        raise ValueError("p must be > 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    t = rng.random((samples, 2))
    s2 = np.zeros(samples)
    for j1 in range(-1, J + 1):
        m1 = np.zeros(samples, dtype=np.int64) if j1 == -1 else np.floor(t[:, 0] * (1 << j1)).astype(np.int64)
        for j2 in range(-1, J + 1):
            m2 = np.zeros(samples, dtype=np.int64) if j2 == -1 else np.floor(t[:, 1] * (1 << j2)).astype(np.int64)
            keys, vals, default = _shape_lookup(shape_table(P, j1, j2))
            lin = m1 * (1 if j2 == -1 else 1 << j2) + m2
            pos = np.minimum(np.searchsorted(keys, lin), max(len(keys) - 1, 0))
            hit = (keys[pos] == lin) if len(keys) else np.zeros(samples, dtype=bool)
            s2 += np.where(hit, vals[pos] if len(keys) else 0.0, default)
    tail = float(square_function_tail(J))
    value, stderr = _mc_norm(np.sqrt(s2), p)
    value_full, _ = _mc_norm(np.sqrt(s2 + tail), p)
    return SquareFunctionResult(value, stderr, tail, value_full, J, p, samples)


def _mc_norm(v, p):
    w = v ** p
    mean = math.fsum(w.tolist()) / len(w)
    se = float(np.std(w, ddof=1)) / math.sqrt(len(w))
    value = mean ** (1.0 / p)
    return value, (value / mean * se / p if mean > 0 else 0.0)


@dataclass
class ChainBound:
    total: float
    ratio: float
    terms: dict


def chain_bound_sum(n: int, sigma: ShiftVector, p: float, J: Optional[int] = None,
                    P: Optional[PointSet] = None) -> ChainBound:
    """``sum_j 2^{2|j|} || sum_m mu_{j,m}^2 1_{I_{j,m}} ||_{p/2}`` over ``-1 <= j1, j2 <= J``.

    The boxes of one shape are disjoint with area ``2^-|j|``, so the inner
    norm is ``(2^-|j| sum_m |mu|^p)^(2/p)``.  ``ratio`` is ``total * 4^n / n``.
    """
    if J is None:
        J = n + 4
    p = float(p)
    if not p > 1:
        raise ValueError("p must be > 1")
    if P is None:
        P = shifted_hammersley(n, sigma)
    terms = {}
    for j1 in range(-1, J + 1):
        for j2 in range(-1, J + 1):
            table = shape_table(P, j1, j2)
            parts = [abs(float(v)) ** p for v in table.values.values()]
            parts.append(table.n_default * abs(float(table.default)) ** p)
            lvl = table.level
            norm = (math.fsum(parts) / (1 << lvl)) ** (2.0 / p)
            terms[(j1, j2)] = (1 << (2 * lvl)) * norm
    total = math.fsum(terms.values())
    return ChainBound(total, total * 4.0 ** n / n, terms)
