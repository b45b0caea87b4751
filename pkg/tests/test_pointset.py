from collections import Counter

import pytest

from hammersley_lp.numerics import Dyadic
from hammersley_lp.pointset import (
    PointSet,
    ShiftVector,
    build_family,
    fold,
    fold_value,
    hammersley,
    parse_shift,
    shift_balance,
    shifted_hammersley,
    symmetrize,
    symmetrize_tilde,
)


def as_set(P):
    return Counter((str(x), str(y)) for x, y in P.points)


def pts(*pairs):
    return Counter((str(Dyadic.parse(a) if "/" in a else Dyadic(int(a))),
                    str(Dyadic.parse(b) if "/" in b else Dyadic(int(b)))) for a, b in pairs)


def test_hammersley_small():
    assert as_set(hammersley(1)) == pts(("0", "0"), ("1/2^1", "1/2^1"))
    assert as_set(hammersley(2)) == pts(("0", "0"), ("1/2^2", "1/2^1"), ("1/2^1", "1/2^2"), ("3/2^2", "3/2^2"))
    assert (Dyadic(1, 3), Dyadic(1, 1)) in hammersley(3).points
    with pytest.raises(ValueError):
        hammersley(0)


def test_shifted_examples():
    assert as_set(shifted_hammersley(2, ShiftVector.zero(2))) == as_set(hammersley(2))
    assert (Dyadic(), Dyadic(1, 1)) in shifted_hammersley(2, ShiftVector((1, 0))).points
    assert as_set(shifted_hammersley(1, ShiftVector((1,)))) == pts(("0", "1/2^1"), ("1/2^1", "0"))
    with pytest.raises(ValueError):
        shifted_hammersley(3, ShiftVector((1, 0)))


@pytest.mark.parametrize("n", [1, 3, 6])
def test_shifted_is_a_net(n):
    # one point in every box of shape 2^-k x 2^-(n-k)
    P = shifted_hammersley(n, ShiftVector.random(n, 5))
    for k in range(n + 1):
        cells = Counter((x >> (n - k), y >> k) for x, y in zip(P.x_num, P.y_num))
        assert len(cells) == 1 << n


def test_symmetrize():
    assert as_set(symmetrize(1, ShiftVector((0,)))) == pts(("0", "0"), ("1/2^1", "1/2^1"), ("0", "1/2^1"), ("1/2^1", "0"))
    for n in range(1, 6):
        assert symmetrize(n, ShiftVector.alt(n)).N == 1 << (n + 1)
    # second half is the reflection y -> 1 - 2^-n - y of the first
    n = 2
    P = symmetrize(n, ShiftVector.zero(n))
    R = shifted_hammersley(n, ShiftVector.zero(n))
    refl = Counter(as_set(R))
    refl.update(Counter((str(x), str(1 - Dyadic(1, n) - y)) for x, y in R.points))
    assert as_set(P) == refl


def test_symmetrize_tilde():
    P = symmetrize_tilde(1, ShiftVector((0,)))
    assert as_set(P) == pts(("0", "0"), ("1/2^1", "1/2^1"), ("0", "1"), ("1/2^1", "1/2^1"))
    assert P.N == 4
    n = 4
    P = symmetrize_tilde(n, ShiftVector.alt(n))
    half = P.N // 2
    assert all(P.points[k + half].y == 1 - P.points[k].y for k in range(half))


def test_fold():
    assert fold_value(3, 2) == 2  # phi(3/4) = 1/2
    assert fold_value(1, 1) == 2  # phi(1/2) = 1
    assert fold_value(0, 5) == 0
    P = fold(4)
    assert P.N == 16 and max(P.x_num) == 1 << 4


def test_shift_balance():
    assert shift_balance(ShiftVector((1, 0, 1, 0))) == (2, 0)
    assert shift_balance(ShiftVector.zero(4)) == (4, 4)
    assert shift_balance(ShiftVector.one(3)) == (0, 3)


def test_parse_shift():
    assert parse_shift("alt", 4) == ShiftVector((1, 0, 1, 0))
    assert parse_shift("bits:0110", 4) == ShiftVector((0, 1, 1, 0))
    assert parse_shift("0110", 4) == parse_shift("bits:0110", 4)
    assert parse_shift("random:7", 9) == parse_shift("random:7", 9)
    a, _ = shift_balance(parse_shift("random-balanced:3", 7))
    assert a == 4
    for bad in ("bits:012", "bits:01", "nope", "random:"):
        with pytest.raises(ValueError):
            parse_shift(bad, 3)


def test_csv_roundtrip():
    P = symmetrize_tilde(3, ShiftVector.alt(3))
    Q = PointSet.from_csv(P.to_csv())
    assert as_set(Q) == as_set(P)


def test_coordinates_and_sizes():
    for fam in ("hammersley", "shifted", "sym", "sym_tilde", "folded"):
        P = build_family(fam, 5, "alt")
        assert P.N == (1 << 6 if fam.startswith("sym") else 1 << 5)
        assert P.scale <= 5
        assert all(0 <= v <= 1 << P.scale for v in P.x_num + P.y_num)


def test_from_points_validation():
    with pytest.raises(ValueError):
        PointSet((1,), (), 0)
    with pytest.raises(ValueError):
        PointSet((3,), (0,), 1)
    assert PointSet.from_points([(Dyadic(1), Dyadic(1))]).log2_N == 0
    with pytest.raises(ValueError):
        PointSet.from_points([(0, 0)] * 3).log2_N
