import math

import pytest

from hammersley_lp.experiments import (
    CSV_FIELDS,
    SweepRecord,
    fit_intercept,
    lower_bound_check,
    lower_bound_constant,
    parse_family,
    perturbation_check,
    records_from_csv,
    records_to_csv,
    run_sweep,
    theorem_reports,
)
from hammersley_lp.pointset import ShiftVector


def test_parse_family():
    assert parse_family("alt") == ("shifted", "alt")
    assert parse_family("random:3") == ("shifted", "random:3")
    assert parse_family("sym:zero") == ("sym", "zero")
    assert parse_family("sym_tilde:bits:0101") == ("sym_tilde", "bits:0101")
    assert parse_family("folded") == ("folded", "zero")
    with pytest.raises(ValueError):
        parse_family("sym")


def test_sweep_cardinality_and_fields():
    recs = run_sweep(["zero", "alt"], range(6, 13), [2])
    assert len(recs) == 14
    alt8 = next(r for r in recs if r.family == "alt" and r.n == 8)
    assert alt8.a_n == 4 and alt8.method == "warnock"
    for r in recs:
        assert r.ratio_sqrt == pytest.approx(r.N * r.lp_value / math.sqrt(math.log(r.N)), rel=1e-12)
        assert r.ratio_log == pytest.approx(r.N * r.lp_value / math.log(r.N), rel=1e-12)


def test_sweep_csv_deterministic_roundtrip():
    a = records_to_csv(run_sweep(["alt", "sym:zero"], [3, 4], [2, 3]))
    b = records_to_csv(run_sweep(["alt", "sym:zero"], [3, 4], [2, 3]))
    assert a == b
    assert a.split("\n", 1)[0] == ",".join(CSV_FIELDS)
    back = records_from_csv(a)
    assert records_to_csv(back) == a
    assert next(r for r in back if r.family == "sym:zero" and r.n == 4).N == 32


def test_sweep_monte_carlo_seed_recorded():
    recs = run_sweep(["alt"], [3], [3], method="monte_carlo", samples=1000, seed=7)
    assert recs[0].seed == 7 and recs[0].method == "monte_carlo"


def test_sweep_range_errors():
    with pytest.raises(ValueError):
        run_sweep(["alt"], [15], [2])
    with pytest.raises(ValueError):
        run_sweep(["alt"], [13], [3])
    with pytest.raises(ValueError):
        run_sweep(["alt"], [4], [3], method="warnock")


def test_fit_intercept():
    ns = [8, 9, 10, 11, 12]
    fit = fit_intercept(ns, [math.sqrt(1 / 64 + 0.1 / n) for n in ns])
    assert fit.intercept == pytest.approx(1 / 64, abs=1e-14)
    assert fit.slope == pytest.approx(0.1, abs=1e-12)
    assert fit.residual < 1e-14
    flat = fit_intercept(ns, [0.5] * 5)
    assert flat.slope == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_intercept([8, 9, 10], [1, 1, 1])


def _rec(fam, n, value, p=2.0):
    return SweepRecord.make(fam, n, 1 << n, "x", 0, p, "warnock", value)


def test_theorem_reports_synthetic():
    good = [_rec("alt", n, math.sqrt(math.log(2 ** n)) / 2 ** n) for n in range(6, 12)]
    grow = [_rec("zero", n, n * math.sqrt(math.log(2 ** n)) / 2 ** n) for n in range(6, 12)]
    rep = theorem_reports(good + grow)
    assert rep["passed"]
    assert rep["bounded"][0]["band"] == pytest.approx(1.0)
    assert rep["contrast"][0]["step_growth"] and rep["contrast"][0]["last_exceeds_base"]
    bad = [_rec("alt", n, 3.0 ** n * math.sqrt(n) / 2 ** n) for n in range(6, 12)]
    assert not theorem_reports(bad)["passed"]


def test_perturbation_examples():
    r = perturbation_check(3, ShiftVector.zero(3), 2)
    assert r.passed and r.bound == 1 / 16
    assert perturbation_check(5, ShiftVector.alt(5), 1.5).passed
    assert perturbation_check(7, ShiftVector.zero(7), 2).bound == 1 / 256


def test_lower_bound():
    c2 = lower_bound_constant(2)
    assert c2 == pytest.approx(7 / (27 * 2 ** 3 * math.sqrt(math.log(2))), rel=1e-15)
    assert round(c2, 5) == 0.03893
    recs = run_sweep(["zero", "alt", "sym:alt", "folded"], range(2, 11), [2])
    rep = lower_bound_check(recs)
    assert rep["passed"] and rep["min_margin"] > 2
    assert not lower_bound_check([])["passed"]
