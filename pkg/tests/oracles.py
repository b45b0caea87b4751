"""Slow reference implementations used only by the tests.

Nothing here calls the counting, grid or Haar code of the package; only the
point-set containers and the Dyadic type are shared.
"""
from __future__ import annotations

from hammersley_lp.numerics import Dyadic
from hammersley_lp.pointset import PointSet

MAX_ORACLE_N = 64


def count_box_naive(P: PointSet, t) -> int:
    """Points with ``x < t1`` and ``y < t2``, by direct scan in Dyadic arithmetic."""
    t1, t2 = (Dyadic.coerce(v) for v in t)
    return sum(1 for x, y in P.points if x < t1 and y < t2)


def _support(j, m):
    """Edges and midpoint of I_{j,m} as integer numerators over 2**(j+1)."""
    if j == -1:
        return 0, 2, None, 1
    return 2 * m, 2 * m + 2, 2 * m + 1, j + 1


def haar_by_cells(P: PointSet, idx) -> Dyadic:
    """``int D_N(t) h_{j1,m1}(t1) h_{j2,m2}(t2) dt`` summed cell by cell.

    The support box is cut at every point coordinate inside it and at the
    midpoints, so the count is constant on each open cell and the sign of
    the Haar product is constant too.  The integral of ``c/N - t1 t2`` over
    a cell is then a closed form in the cell corners.
    """
    N = P.N
    if N > MAX_ORACLE_N:
        raise ValueError(f"N={N} exceeds the oracle guard {MAX_ORACLE_N}")
    j1, j2, m1, m2 = idx
    S = max(P.scale, j1 + 1, j2 + 1, 1)
    pts = [(x.scaled(S), y.scaled(S)) for x, y in P.points]
    top = 1 << S

    def breaks(j, m, coords):
        lo, hi, mid, e = _support(j, m)
        f = 1 << (S - e)
        lo, hi = lo * f, hi * f
        cuts = {lo, hi} | {c for c in coords if lo < c < hi}
        if mid is not None:
            cuts.add(mid * f)
        return sorted(cuts), (mid * f if mid is not None else None)

    xs, xmid = breaks(j1, m1, [p[0] for p in pts])
    ys, ymid = breaks(j2, m2, [p[1] for p in pts])
    total = 0
    for a0, a1 in zip(xs, xs[1:]):
        sx = 1 if xmid is None or a1 <= xmid else -1
        for b0, b1 in zip(ys, ys[1:]):
            sy = 1 if ymid is None or b1 <= ymid else -1
            c = sum(1 for X, Y in pts if X < a1 and Y < b1)
            # 4 N top^4 * integral over the cell
            term = 4 * c * top * top * (a1 - a0) * (b1 - b0) - N * (a1 * a1 - a0 * a0) * (b1 * b1 - b0 * b0)
            total += sx * sy * term
    return Dyadic(total, 2 + P.log2_N + 4 * S)


def square_function_grid(P: PointSet, p: float, J: int) -> float:
    """``|| S_J(D_N) ||_p`` with shapes ``j1, j2 <= J``, by exact evaluation on the 2^-J grid.

    Every truncated Haar term is constant on the dyadic squares of side
    ``2**-J``, so ``S_J^2`` is evaluated once per square from
    :func:`haar_by_cells` coefficients.
    """
    side = 1 << J
    levels = range(-1, J + 1)
    s2 = [[Dyadic() for _ in range(side)] for _ in range(side)]
    for j1 in levels:
        for j2 in levels:
            weight = Dyadic(1 << (2 * (max(0, j1) + max(0, j2))))
            n1 = 1 if j1 == -1 else 1 << j1
            n2 = 1 if j2 == -1 else 1 << j2
            for m1 in range(n1):
                for m2 in range(n2):
                    mu = haar_by_cells(P, (j1, j2, m1, m2))
                    term = weight * mu * mu
                    w1, w2 = side // n1, side // n2
                    for a in range(m1 * w1, (m1 + 1) * w1):
                        for b in range(m2 * w2, (m2 + 1) * w2):
                            s2[a][b] = s2[a][b] + term
    total = sum(float(v) ** (p / 2) for row in s2 for v in row) / side ** 2
    return total ** (1 / p)
