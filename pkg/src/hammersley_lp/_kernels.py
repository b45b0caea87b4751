"""Compiled inner loops for cellwise L_p integration.

On a cell ``(x0, x1] x (y0, y1]`` with constant count ``c`` the integrand is
``|a - t1*t2|**p`` with ``a = c/N``.  The t2-integral is closed form; the
t1-integral is Gauss-Legendre on pieces split where ``a = t1*t2`` enters or
leaves the cell.  Each piece is mapped through the cubic ``3s^2 - 2s^3`` so
the ``|u|**(p+1)`` endpoint behaviour at a split becomes smooth enough for
geometric convergence.
"""
import math
import warnings

import numpy as np
from numba import NumbaWarning, njit, prange

# an outdated system TBB only means numba falls back to another threading layer
warnings.filterwarnings("ignore", message="The TBB threading layer", category=NumbaWarning)

_REFINE_LEVELS = (1, 4, 16, 64)


@njit(cache=True)
def _pow_diff(b, d, q):
    """(b + d)**q - b**q for b >= 0, d > 0 without cancellation."""
    if b > 2.0 * d:
        return b ** q * math.expm1(q * math.log1p(d / b))
    return (b + d) ** q - b ** q


@njit(cache=True)
def _inner(t1, a, y0, y1, q):
    """Integral over t2 in (y0, y1] of |a - t1*t2|**(q-1)."""
    if t1 == 0.0:
        return (y1 - y0) * abs(a) ** (q - 1.0)
    u_lo = a - t1 * y0
    u_hi = a - t1 * y1
    d = t1 * (y1 - y0)
    if u_hi >= 0.0:
        return _pow_diff(u_hi, d, q) / (q * t1)
    if u_lo <= 0.0:
        return _pow_diff(-u_lo, d, q) / (q * t1)
    return (u_lo ** q + (-u_hi) ** q) / (q * t1)


@njit(cache=True)
def _gl_piece(lo, hi, a, y0, y1, q, nodes, weights, parts):
    w = hi - lo
    h = w / parts
    total = 0.0
    for s in range(parts):
        base = lo + s * h
        acc = 0.0
        for k in range(nodes.shape[0]):
            z = nodes[k]
            t = base + h * z * z * (3.0 - 2.0 * z)
            acc += weights[k] * 6.0 * z * (1.0 - z) * _inner(t, a, y0, y1, q)
        total += h * acc
    return total


@njit(cache=True)
def _cell(x0, x1, a, y0, y1, q, n_lo, w_lo, n_hi, w_hi, rtol):
    """Return (integral, converged) for one cell."""
    br = np.empty(4)
    br[0] = x0
    cnt = 1
    k1 = a / y1
    k2 = a / y0 if y0 > 0.0 else np.inf
    if x0 < k1 < x1:
        br[cnt] = k1
        cnt += 1
    if x0 < k2 < x1 and k2 != k1:
        br[cnt] = k2
        cnt += 1
    br[cnt] = x1
    cnt += 1
    val_hi = 0.0
    for parts in _REFINE_LEVELS:
        val_lo = 0.0
        val_hi = 0.0
        for i in range(cnt - 1):
            val_lo += _gl_piece(br[i], br[i + 1], a, y0, y1, q, n_lo, w_lo, parts)
            val_hi += _gl_piece(br[i], br[i + 1], a, y0, y1, q, n_hi, w_hi, parts)
        if abs(val_hi - val_lo) <= rtol * abs(val_hi):
            return val_hi, True
    return val_hi, False


@njit(parallel=True, cache=True)
def column_integrals(xb, yb, counts, inv_n, p, n_lo, w_lo, n_hi, w_hi, rtol):
    """Per-column integrals of |D|^p plus the number of unconverged cells.

    Cells of a column with equal consecutive counts are merged.  Within a
    column the sum is Neumaier-compensated so the result does not depend on
    how columns are distributed over threads.
    """
    K = xb.shape[0] - 1
    M = yb.shape[0] - 1
    q = p + 1.0
    out = np.zeros(K)
    bad = np.zeros(K, dtype=np.int64)
    for i in prange(K):
        x0 = xb[i]
        x1 = xb[i + 1]
        s = 0.0
        comp = 0.0
        j = 0
        while j < M:
            c = counts[i, j]
            jj = j + 1
            while jj < M and counts[i, jj] == c:
                jj += 1
            v, ok = _cell(x0, x1, c * inv_n, yb[j], yb[jj], q, n_lo, w_lo, n_hi, w_hi, rtol)
            if not ok:
                bad[i] += 1
            t = s + v
            if abs(s) >= abs(v):
                comp += (s - t) + v
            else:
                comp += (v - t) + s
            s = t
            j = jj
        out[i] = s + comp
    return out, bad


def gauss_legendre_unit(order):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w
