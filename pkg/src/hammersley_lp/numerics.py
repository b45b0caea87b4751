"""Exact dyadic rationals.

A :class:`Dyadic` is ``mantissa / 2**exponent`` with an arbitrary precision
integer mantissa.  The ring is closed under ``+``, ``-`` and ``*``; there is
deliberately no division.  Scaling by ``1/N`` for ``N = 2**n`` is
multiplication by ``Dyadic(1, n)``.
"""
from __future__ import annotations

import re
from functools import total_ordering

__all__ = [
    "Dyadic",
    "dyadic_normalize",
    "dyadic_arith",
    "dyadic_to_real",
    "dyadic_compare",
    "ZERO",
    "ONE",
    "HALF",
]

_TEXT_RE = re.compile(r"^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")


@total_ordering
class Dyadic:
    """Immutable value ``mantissa / 2**exponent`` kept in canonical form.

    Canonical form: the mantissa is odd, or the exponent is 0 (integers,
    including zero, carry exponent 0).
    """

    __slots__ = ("_m", "_e")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        if exponent < 0:
            raise ValueError("exponent must be non-negative")
        m = int(mantissa)
        e = int(exponent)
        if m == 0:
            e = 0
        elif e:
            tz = (m & -m).bit_length() - 1
            if tz:
                s = tz if tz < e else e
                m >>= s
                e -= s
        self._m = m
        self._e = e

    @classmethod
    def _raw(cls, m: int, e: int) -> "Dyadic":
        obj = object.__new__(cls)
        obj._m = m
        obj._e = e
        return obj

    @classmethod
    def coerce(cls, value) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls._raw(int(value), 0)
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic exactly")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse the ``"m/2^e"`` textual form (plain integers are accepted too)."""
        match = _TEXT_RE.match(text)
        if match:
            return cls(int(match.group(1)), int(match.group(2)))
        return cls(int(text.strip()), 0)

    @property
    def mantissa(self) -> int:
        return self._m

    @property
    def exponent(self) -> int:
        return self._e

    def scaled(self, exponent: int) -> int:
        """Return the integer ``self * 2**exponent``; raises if not integral."""
        if exponent >= self._e:
            return self._m << (exponent - self._e)
        raise ValueError(f"{self} is not a multiple of 2^-{exponent}")

    def __add__(self, other):
        if isinstance(other, int):
            # odd mantissa plus an even shifted integer stays odd
            return Dyadic._raw(self._m + (other << self._e), self._e)
        if not isinstance(other, Dyadic):
            return NotImplemented
        ea, eb = self._e, other._e
        if ea == eb:
            return Dyadic(self._m + other._m, ea)
        if ea > eb:
            return Dyadic._raw(self._m + (other._m << (ea - eb)), ea)
        return Dyadic._raw((self._m << (eb - ea)) + other._m, eb)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic._raw(-self._m, self._e)

    def __pos__(self):
        return self

    def __abs__(self):
        return self if self._m >= 0 else Dyadic._raw(-self._m, self._e)

    def __sub__(self, other):
        if isinstance(other, int):
            other = Dyadic._raw(other, 0)
        elif not isinstance(other, Dyadic):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if not isinstance(other, int):
            return NotImplemented
        return Dyadic._raw(other, 0) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return Dyadic(self._m * other, self._e)
        if not isinstance(other, Dyadic):
            return NotImplemented
        # product of odd mantissas is odd; only zero needs renormalising
        m = self._m * other._m
        if self._e and other._e:
            return Dyadic._raw(m, self._e + other._e)
        return Dyadic(m, self._e + other._e)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self._e == 0 and self._m == other
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self._m == other._m and self._e == other._e

    def __lt__(self, other):
        if isinstance(other, int):
            other = Dyadic._raw(other, 0)
        elif not isinstance(other, Dyadic):
            return NotImplemented
        return _cmp(self, other) < 0

    def __hash__(self):
        if self._e == 0:
            return hash(self._m)
        return hash((self._m, self._e))

    def __bool__(self):
        return self._m != 0

    def __float__(self):
        # int / int is correctly rounded in CPython
        if self._e == 0:
            return float(self._m)
        return self._m / (1 << self._e)

    def __repr__(self):
        return f"Dyadic({self._m}, {self._e})"

    def __str__(self):
        return f"{self._m}/2^{self._e}"

    def sign(self) -> int:
        return (self._m > 0) - (self._m < 0)


def _cmp(a: Dyadic, b: Dyadic) -> int:
    ea, eb = a._e, b._e
    if ea >= eb:
        x, y = a._m, b._m << (ea - eb)
    else:
        x, y = a._m << (eb - ea), b._m
    return (x > y) - (x < y)


ZERO = Dyadic._raw(0, 0)
ONE = Dyadic._raw(1, 0)
HALF = Dyadic._raw(1, 1)


def dyadic_normalize(mantissa: int, exponent: int) -> Dyadic:
    return Dyadic(mantissa, exponent)


def dyadic_arith(op: str, a: Dyadic, b: Dyadic) -> Dyadic:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unsupported dyadic operation {op!r}")


def dyadic_to_real(a: Dyadic) -> float:
    return float(a)


def dyadic_compare(a: Dyadic, b: Dyadic) -> str:
    c = _cmp(Dyadic.coerce(a), Dyadic.coerce(b))
    return ("less", "equal", "greater")[c + 1]
