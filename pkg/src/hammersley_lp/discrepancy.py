"""Counting, local discrepancy and L_p-discrepancy of planar point sets.

Three independent routes to the L_p-discrepancy are provided:

* :func:`l2_warnock` -- closed form double sum, p = 2 only;
* :func:`lp_cellwise` -- integration over the cells on which the counting
  function is constant, any real p > 1;
* :func:`lp_monte_carlo` -- seeded uniform sampling with a standard error.
"""
from __future__ import annotations

import bisect
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .numerics import Dyadic
from .pointset import PointSet

__all__ = [
    "CellGrid",
    "LpResult",
    "count_box",
    "local_discrepancy",
    "build_cell_grid",
    "l2_warnock",
    "lp_cellwise",
    "lp_monte_carlo",
    "WARNOCK_MAX_N",
    "CELLWISE_MAX_N",
]

WARNOCK_MAX_N = 14
CELLWISE_MAX_N = 12
DEFAULT_QUAD_ORDER = 16
CELL_RTOL = 1e-11


def _set_workers():
    workers = os.environ.get("HAMMERSLEY_LP_WORKERS")
    if workers:
        import numba

        numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))


def _as_dyadic_point(t):
    t1, t2 = (Dyadic.coerce(v) for v in t)
    if not (0 <= t1 <= 1 and 0 <= t2 <= 1):
        raise ValueError(f"t = ({t1}, {t2}) is outside the unit square")
    return t1, t2


def _threshold(value: Dyadic, scale: int) -> int:
    """Smallest integer T with ``num < T  <=>  num / 2**scale < value`` for integer num."""
    if value.exponent <= scale:
        return value.mantissa << (scale - value.exponent)
    shift = value.exponent - scale
    return -((-value.mantissa) >> shift)


def count_box(P: PointSet, t) -> int:
    """Number of points (with multiplicity) with ``x < t1`` and ``y < t2``."""
    t1, t2 = _as_dyadic_point(t)
    tx = _threshold(t1, P.scale)
    ty = _threshold(t2, P.scale)
    xs = np.asarray(P.x_num, dtype=object) if P.scale > 60 else np.asarray(P.x_num)
    ys = np.asarray(P.y_num, dtype=object) if P.scale > 60 else np.asarray(P.y_num)
    return int(np.count_nonzero((xs < tx) & (ys < ty)))


def local_discrepancy(P: PointSet, t) -> Dyadic:
    """Exact ``A_N([0, t)) / N - t1 * t2``."""
    t1, t2 = _as_dyadic_point(t)
    return Dyadic(count_box(P, (t1, t2)), P.log2_N) - t1 * t2


@dataclass
class CellGrid:
    """Product grid of distinct coordinates on which ``A_N([0, t))`` is constant.

    Cell ``(i, j)`` is ``(x_breaks[i], x_breaks[i+1]] x (y_breaks[j], y_breaks[j+1]]``
    and ``counts[i, j] = #{k : x_k <= x_breaks[i], y_k <= y_breaks[j]}``,
    which equals ``A_N([0, t))`` for every ``t`` in that cell.
    """

    x_breaks: list
    y_breaks: list
    counts: np.ndarray
    N: int
    scale: int
    x_num: np.ndarray = field(repr=False, default=None)
    y_num: np.ndarray = field(repr=False, default=None)

    @property
    def shape(self):
        return self.counts.shape

    def lookup(self, t) -> int:
        t1, t2 = _as_dyadic_point(t)
        i = bisect.bisect_left(self.x_breaks, t1) - 1
        j = bisect.bisect_left(self.y_breaks, t2) - 1
        if i < 0 or j < 0:
            return 0
        return int(self.counts[i, j])

    def local_discrepancy(self, t) -> Dyadic:
        t1, t2 = _as_dyadic_point(t)
        nu = self.N.bit_length() - 1
        if self.N != 1 << nu:
            raise ValueError("N is not a power of two")
        return Dyadic(self.lookup((t1, t2)), nu) - t1 * t2

    def float_breaks(self):
        d = float(1 << self.scale)
        return self.x_num / d, self.y_num / d


def build_cell_grid(P: PointSet) -> CellGrid:
    top = 1 << P.scale
    xs = np.asarray(P.x_num, dtype=np.int64)
    ys = np.asarray(P.y_num, dtype=np.int64)
    xb = np.unique(np.concatenate([xs, [0, top]]))
    yb = np.unique(np.concatenate([ys, [0, top]]))
    K, M = len(xb) - 1, len(yb) - 1
    xi = np.searchsorted(xb, xs)
    yi = np.searchsorted(yb, ys)
    # a coordinate equal to 1 sits on the last break and is never counted
    keep = (xi < K) & (yi < M)
    hist = np.zeros((K, M), dtype=np.int64)
    np.add.at(hist, (xi[keep], yi[keep]), 1)
    counts = hist.cumsum(axis=0).cumsum(axis=1)
    if P.N < 2 ** 31:
        counts = counts.astype(np.int32)
    s = P.scale
    return CellGrid(
        x_breaks=[Dyadic(int(v), s) for v in xb],
        y_breaks=[Dyadic(int(v), s) for v in yb],
        counts=counts,
        N=P.N,
        scale=s,
        x_num=xb,
        y_num=yb,
    )


@dataclass
class LpResult:
    value: float
    p: float
    method: str
    stderr: Optional[float] = None
    family: Optional[str] = None
    n: Optional[int] = None
    shift: Optional[str] = None

    def __post_init__(self):
        if self.method not in ("warnock", "cellwise", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if (self.stderr is not None) != (self.method == "monte_carlo"):
            raise ValueError("stderr is reported for monte_carlo only")

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "n": self.n,
            "shift": self.shift,
            "p": self.p,
            "method": self.method,
            "value": self.value,
        }
        if self.stderr is not None:
            d["stderr"] = self.stderr
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=_json_float)


def _json_float(o):
    raise TypeError(type(o).__name__)


def _tags(P: PointSet) -> dict:
    return {"family": P.family, "n": P.n or None,
            "shift": str(P.shift) if P.shift is not None else None}


def l2_warnock(P: PointSet, chunk: int = 256) -> LpResult:
    """L_2-discrepancy from Warnock's double sum.

    With ``X = 2**scale * x`` integer, every term of both sums is an integer
    multiple of a fixed power of two, so the sums are accumulated exactly in
    int64 (per row block) and Python ints; only the final square root rounds.
    """
    s = P.scale
    top = 1 << s
    N = P.N
    if (min(chunk, N) * N * top * top).bit_length() > 62:
        raise ValueError("point set too large for exact Warnock accumulation")
    ux = top - np.asarray(P.x_num, dtype=np.int64)
    uy = top - np.asarray(P.y_num, dtype=np.int64)
    pair = 0
    for start in range(0, N, chunk):
        bx = np.minimum(ux[start:start + chunk, None], ux[None, :])
        by = np.minimum(uy[start:start + chunk, None], uy[None, :])
        pair += int((bx * by).sum(dtype=np.int64))
    vx = np.asarray(P.x_num, dtype=object)
    vy = np.asarray(P.y_num, dtype=object)
    single = int(((top * top - vx * vx) * (top * top - vy * vy)).sum())
    # pair / (N^2 4^s) - 2/N * single / (4 * 16^s) + 1/9
    sq = (Fraction(pair, N * N * top * top)
          - Fraction(single, 2 * N * top ** 4)
          + Fraction(1, 9))
    return LpResult(math.sqrt(sq), 2.0, "warnock", **_tags(P))


def lp_cellwise(P: PointSet, p: float, quad_order: int = DEFAULT_QUAD_ORDER,
                grid: Optional[CellGrid] = None) -> LpResult:
    """L_p-discrepancy by integrating ``|c/N - t1 t2|^p`` cell by cell.

    Each cell's value at ``quad_order`` is checked against ``quad_order + 8``;
    cells that disagree beyond 1e-11 (relative) are subdivided.  Raises
    ``ArithmeticError`` if any cell fails to settle.
    """
    from . import _kernels

    p = float(p)
    if not p > 1:
        raise ValueError("p must be > 1")
    if quad_order < 4:
        raise ValueError("quad_order must be >= 4")
    _set_workers()
    if grid is None:
        grid = build_cell_grid(P)
    xb, yb = grid.float_breaks()
    n_lo, w_lo = _kernels.gauss_legendre_unit(quad_order)
    n_hi, w_hi = _kernels.gauss_legendre_unit(quad_order + 8)
    cols, bad = _kernels.column_integrals(
        xb, yb, grid.counts, 1.0 / P.N, p, n_lo, w_lo, n_hi, w_hi, CELL_RTOL)
    if bad.sum():
        raise ArithmeticError(f"{int(bad.sum())} cells did not converge")
    total = math.fsum(cols.tolist())
    return LpResult(total ** (1.0 / p), p, "cellwise", **_tags(P))


def lp_monte_carlo(P: PointSet, p: float, samples: int = 10 ** 6, seed: int = 0,
                   chunk: int = 1 << 18) -> LpResult:
    """Monte Carlo estimate of the L_p-discrepancy.

    The integral ``m = E|D|^p`` is estimated by its sample mean and the value
    is ``m**(1/p)``; the delta method gives ``stderr = m**(1/p - 1) se(m) / p``.
    """
    p = float(p)
    if not p > 1:
        raise ValueError("p must be > 1")
    if samples < 100:
        raise ValueError("samples must be >= 100")
    grid = build_cell_grid(P)
    xb, yb = grid.float_breaks()
    rng = np.random.Generator(np.random.PCG64(seed))
    inv_n = 1.0 / P.N
    sums = []
    sq_sums = []
    remaining = samples
    while remaining:
        k = min(chunk, remaining)
        remaining -= k
        t = rng.random((k, 2))
        i = np.searchsorted(xb, t[:, 0], side="left") - 1
        j = np.searchsorted(yb, t[:, 1], side="left") - 1
        c = np.where((i >= 0) & (j >= 0), grid.counts[np.maximum(i, 0), np.maximum(j, 0)], 0)
        v = np.abs(c * inv_n - t[:, 0] * t[:, 1]) ** p
        sums.append(math.fsum(v.tolist()))
        sq_sums.append(math.fsum((v * v).tolist()))
    mean = math.fsum(sums) / samples
    var = max(math.fsum(sq_sums) / samples - mean * mean, 0.0) * samples / (samples - 1)
    se_mean = math.sqrt(var / samples)
    value = mean ** (1.0 / p)
    stderr = value / mean * se_mean / p if mean > 0 else 0.0
    return LpResult(value, p, "monte_carlo", stderr=stderr, **_tags(P))
