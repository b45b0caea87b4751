"""Two-dimensional Hammersley-type point sets with exact dyadic coordinates.

Every point set is stored as integer numerators over a common power of two,
``x = x_num / 2**scale``.  Point order is generation order and duplicates
are kept (multiset semantics).
"""
from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .numerics import Dyadic

__all__ = [
    "ShiftVector",
    "GridPoint",
    "PointSet",
    "hammersley",
    "shifted_hammersley",
    "symmetrize",
    "symmetrize_tilde",
    "fold",
    "fold_value",
    "shift_balance",
    "parse_shift",
    "SHIFT_FAMILIES",
    "CONSTRUCTIONS",
    "build_family",
]

SHIFT_FAMILIES = ("zero", "one", "alt", "random-balanced", "random")
CONSTRUCTIONS = ("hammersley", "shifted", "sym", "sym_tilde", "folded")


@dataclass(frozen=True)
class ShiftVector:
    """Digit shift (sigma_1, ..., sigma_n), each entry 0 or 1."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"shift entries must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    def complement(self) -> "ShiftVector":
        return ShiftVector(tuple(1 - b for b in self.bits))

    def as_int(self) -> int:
        """The y-numerator XOR mask: sum of sigma_i * 2**(n - i)."""
        mask = 0
        for b in self.bits:
            mask = (mask << 1) | b
        return mask

    def __str__(self):
        return "".join(str(b) for b in self.bits)

    @classmethod
    def zero(cls, n):
        return cls((0,) * n)

    @classmethod
    def one(cls, n):
        return cls((1,) * n)

    @classmethod
    def alt(cls, n):
        return cls(tuple((i + 1) % 2 for i in range(n)))

    @classmethod
    def random(cls, n, seed):
        rng = random.Random(seed)
        return cls(tuple(rng.getrandbits(1) for _ in range(n)))

    @classmethod
    def random_balanced(cls, n, seed):
        zeros = math.ceil(n / 2)
        bits = [0] * zeros + [1] * (n - zeros)
        random.Random(seed).shuffle(bits)
        return cls(tuple(bits))

    @classmethod
    def from_string(cls, text):
        return cls(tuple(int(c) for c in text))


def parse_shift(spec: str, n: int) -> ShiftVector:
    """Parse ``zero | one | alt | random:<seed> | random-balanced:<seed> | bits:<01..>``.

    A bare 0/1 string is accepted as shorthand for ``bits:``.
    """
    spec = spec.strip()
    if spec == "zero":
        return ShiftVector.zero(n)
    if spec == "one":
        return ShiftVector.one(n)
    if spec == "alt":
        return ShiftVector.alt(n)
    kind, _, arg = spec.partition(":")
    if kind == "random" and arg:
        return ShiftVector.random(n, int(arg))
    if kind == "random-balanced" and arg:
        return ShiftVector.random_balanced(n, int(arg))
    if kind == "bits" or (not arg and spec and set(spec) <= {"0", "1"}):
        text = arg if kind == "bits" else spec
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"bad bit string in shift spec {spec!r}")
        sigma = ShiftVector.from_string(text)
        if sigma.n != n:
            raise ValueError(f"shift has length {sigma.n}, expected n={n}")
        return sigma
    raise ValueError(f"unknown shift spec {spec!r}")


class GridPoint(NamedTuple):
    x: Dyadic
    y: Dyadic


@dataclass(frozen=True)
class PointSet:
    """Finite multiset of points in [0,1]^2.

    ``x_num[k] / 2**scale`` and ``y_num[k] / 2**scale`` are the coordinates
    of point ``k``.  Coordinates equal to 1 are allowed; they are never
    inside a counting box ``[0, t)``.
    """

    x_num: tuple
    y_num: tuple
    scale: int
    n: int = 0
    family: str = "custom"
    shift: Optional[ShiftVector] = None
    _points: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.x_num) != len(self.y_num):
            raise ValueError("x and y numerator sequences differ in length")
        if not self.x_num:
            raise ValueError("empty point set")
        top = 1 << self.scale
        for v in (*self.x_num, *self.y_num):
            if not 0 <= v <= top:
                raise ValueError("coordinate outside [0, 1]")

    @classmethod
    def from_points(cls, points: Sequence, family: str = "custom", n: int = 0,
                    shift: Optional[ShiftVector] = None) -> "PointSet":
        """Build from ``(x, y)`` pairs of Dyadics or ints."""
        pts = [(Dyadic.coerce(x), Dyadic.coerce(y)) for x, y in points]
        scale = max(max(x.exponent, y.exponent) for x, y in pts)
        return cls(tuple(x.scaled(scale) for x, _ in pts),
                   tuple(y.scaled(scale) for _, y in pts),
                   scale, n=n, family=family, shift=shift)

    @property
    def N(self) -> int:
        return len(self.x_num)

    @property
    def log2_N(self) -> int:
        """Exponent ``nu`` with ``N = 2**nu``; raises if N is not a power of two."""
        N = self.N
        if N & (N - 1):
            raise ValueError(f"N={N} is not a power of two; 1/N is not dyadic")
        return N.bit_length() - 1

    @property
    def points(self) -> tuple:
        if self._points is None:
            s = self.scale
            pts = tuple(GridPoint(Dyadic(a, s), Dyadic(b, s))
                        for a, b in zip(self.x_num, self.y_num))
            object.__setattr__(self, "_points", pts)
        return self._points

    def __len__(self):
        return self.N

    def __iter__(self):
        return iter(self.points)

    def floats(self):
        """Coordinates as two float64 arrays (exact for scale <= 52)."""
        import numpy as np

        d = float(1 << self.scale)
        return (np.asarray(self.x_num, dtype=np.float64) / d,
                np.asarray(self.y_num, dtype=np.float64) / d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_num", "y_num", "scale_exp"])
        for a, b in zip(self.x_num, self.y_num):
            w.writerow([a, b, self.scale])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, family: str = "custom") -> "PointSet":
        rows = list(csv.DictReader(io.StringIO(text)))
        pts = [(Dyadic(int(r["x_num"]), int(r["scale_exp"])),
                Dyadic(int(r["y_num"]), int(r["scale_exp"]))) for r in rows]
        return cls.from_points(pts, family=family)


def _bit_reverse(k: int, n: int) -> int:
    r = 0
    for _ in range(n):
        r = (r << 1) | (k & 1)
        k >>= 1
    return r


def _check_shift(n: int, sigma: ShiftVector):
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigma.n != n:
        raise ValueError(f"shift has length {sigma.n}, expected n={n}")


def _shifted_nums(n: int, mask: int):
    # k carries digits t_1..t_n as bits 0..n-1: x*2^n = k, y*2^n = rev(k)
    size = 1 << n
    xs = tuple(range(size))
    ys = tuple(_bit_reverse(k, n) ^ mask for k in xs)
    return xs, ys


def hammersley(n: int) -> PointSet:
    if n < 1:
        raise ValueError("n must be >= 1")
    xs, ys = _shifted_nums(n, 0)
    return PointSet(xs, ys, n, n=n, family="hammersley", shift=ShiftVector.zero(n))


def shifted_hammersley(n: int, sigma: ShiftVector) -> PointSet:
    _check_shift(n, sigma)
    xs, ys = _shifted_nums(n, sigma.as_int())
    return PointSet(xs, ys, n, n=n, family="shifted", shift=sigma)


def symmetrize(n: int, sigma: ShiftVector) -> PointSet:
    _check_shift(n, sigma)
    x1, y1 = _shifted_nums(n, sigma.as_int())
    x2, y2 = _shifted_nums(n, sigma.complement().as_int())
    return PointSet(x1 + x2, y1 + y2, n, n=n, family="sym", shift=sigma)


def symmetrize_tilde(n: int, sigma: ShiftVector) -> PointSet:
    _check_shift(n, sigma)
    xs, ys = _shifted_nums(n, sigma.as_int())
    top = 1 << n
    return PointSet(xs + xs, ys + tuple(top - y for y in ys), n, n=n,
                    family="sym_tilde", shift=sigma)


def fold_value(num: int, scale: int) -> int:
    """Numerator of phi(x) = 1 - |2x - 1| for x = num / 2**scale."""
    top = 1 << scale
    return top - abs(2 * num - top)


def fold(n: int) -> PointSet:
    base = hammersley(n)
    xs = tuple(fold_value(a, n) for a in base.x_num)
    ys = tuple(fold_value(b, n) for b in base.y_num)
    return PointSet(xs, ys, n, n=n, family="folded", shift=None)


def shift_balance(sigma: ShiftVector) -> tuple:
    """Return ``(a_n, |2 a_n - n|)`` with ``a_n`` the number of zero digits."""
    a = sum(1 for b in sigma.bits if b == 0)
    return a, abs(2 * a - sigma.n)


def build_family(construction: str, n: int, shift: str = "zero") -> PointSet:
    """Construct one of :data:`CONSTRUCTIONS` from a shift spec string."""
    if construction == "hammersley":
        return hammersley(n)
    if construction == "folded":
        return fold(n)
    sigma = parse_shift(shift, n)
    if construction == "shifted":
        return shifted_hammersley(n, sigma)
    if construction == "sym":
        return symmetrize(n, sigma)
    if construction == "sym_tilde":
        return symmetrize_tilde(n, sigma)
    raise ValueError(f"unknown construction {construction!r}")
