"""Numba kernels for lattice last-passage dynamic programming.

All kernels read weights through the same counter-based hash as rng.py
(bit-identical, tested), so a "sample" is fully determined by its seed and
every geometry evaluated under that seed sees one common weight field.

Conventions
-----------
* Path sums exclude the start vertex: a start cell carries DP value 0.
* Start sets are antichains (no start reachable from another); the DP clamps
  start cells to max(value, 0), which is exact for antichains and harmless
  otherwise.
* Rate rule: row j has rate `alpha` when rate_lo <= j <= rate_hi, else 1.
  The standard two-speed field is (rate_lo, rate_hi) = (-2^62, 0).
* Tie-breaking for maximizers: on an exact float tie the "up" predecessor
  (i, j-1) is preferred.  Continuous weights make ties a.s. impossible; the
  rule only pins down behavior on manufactured fields.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# keep in sync with rng.py (tested for bit-identity)
_C_I = np.uint64(0x9E3779B97F4A7C15)
_C_J = np.uint64(0xC2B2AE3D27D4EB4F)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 2.0 ** -53

RATE_LO_DEFAULT = -(2 ** 62)  # "j <= 0 is the alpha region"
RATE_HI_DEFAULT = 0

NEG_INF = -np.inf


@njit(cache=True, inline="always")
def _mix(x):
    x = (x ^ (x >> _S30)) * _M1
    x = (x ^ (x >> _S27)) * _M2
    return x ^ (x >> _S31)


@njit(cache=True, inline="always")
def _weight(seed, i, j, alpha, rate_lo, rate_hi):
    h = np.uint64(seed) ^ (np.uint64(i) * _C_I) ^ (np.uint64(j) * _C_J)
    h = _mix(_mix(h) + _C_I)
    u = (np.float64(h >> _S11) + 0.5) * _INV_2_53
    rate = alpha if (j >= rate_lo and j <= rate_hi) else 1.0
    return -math.log(u) / rate


@njit(cache=True, nogil=True)
def weights_block(seed, i0, i1, j0, j1, alpha, rate_lo, rate_hi):
    """Materialize omega over the inclusive box [i0,i1]x[j0,j1]; out[j-j0, i-i0]."""
    out = np.empty((j1 - j0 + 1, i1 - i0 + 1))
    for j in range(j0, j1 + 1):
        for i in range(i0, i1 + 1):
            out[j - j0, i - i0] = _weight(seed, i, j, alpha, rate_lo, rate_hi)
    return out


@njit(cache=True, nogil=True)
def lpp_value(seed, alpha, rate_lo, rate_hi, kind, v_lo, v_hi, a, b,
              m, n, m2, n2, want2):
    """Last-passage value to (m, n), optionally also capturing (m2, n2).

    kind 0: start set is the anti-diagonal segment {(-v, v): v_lo <= v <= v_hi}
            (v may be negative, covering fourth-quadrant half-lines).
    kind 1: start set is the single point (a, b).

    Returns (L, L2); L2 is -inf unless want2 and (m2, n2) lies in the region.
    """
    if kind == 0:
        vlo = v_lo if v_lo > -m else -m
        vhi = v_hi if v_hi < n else n
        if vlo > vhi:
            return NEG_INF, NEG_INF
        j0 = vlo
        i_min = -vhi
    else:
        if a > m or b > n:
            return NEG_INF, NEG_INF
        j0 = b
        i_min = a
    width = m - i_min + 1
    g = np.full(width, NEG_INF)
    l2 = NEG_INF
    for j in range(j0, n + 1):
        if kind == 0:
            lo = -j if j < vhi else -vhi
            st_i = -j if j <= vhi else i_min - 1  # sentinel when no start here
        else:
            lo = a
            st_i = a if j == b else i_min - 1
        left = NEG_INF
        for i in range(lo, m + 1):
            ix = i - i_min
            up = g[ix]
            best = up if up >= left else left
            cell = best + _weight(seed, i, j, alpha, rate_lo, rate_hi)
            if i == st_i and cell < 0.0:
                cell = 0.0
            g[ix] = cell
            left = cell
        if want2 and j == n2 and m2 >= lo and m2 <= m:
            l2 = g[m2 - i_min]
    return g[m - i_min], l2


@njit(cache=True, nogil=True)
def lpp_value_batch(seeds, alpha, rate_lo, rate_hi, kind, v_lo, v_hi, a, b,
                    m, n, m2, n2, want2):
    """lpp_value over a vector of seeds; returns (L[], L2[])."""
    k = len(seeds)
    out = np.empty(k)
    out2 = np.empty(k)
    for s in range(k):
        l, l2 = lpp_value(seeds[s], alpha, rate_lo, rate_hi, kind,
                          v_lo, v_hi, a, b, m, n, m2, n2, want2)
        out[s] = l
        out2[s] = l2
    return out, out2


@njit(cache=True, nogil=True)
def lpp_path(seed, alpha, rate_lo, rate_hi, kind, v_lo, v_hi, a, b, m, n):
    """Last-passage value plus the backtracked maximizer path to (m, n).

    Returns (value, path_i, path_j, length); the path runs origin -> end.
    Choice bits: 1 = predecessor (i, j-1) ("up", preferred on ties),
    0 = predecessor (i-1, j), 2 = path origin (a start cell).
    """
    if kind == 0:
        vlo = v_lo if v_lo > -m else -m
        vhi = v_hi if v_hi < n else n
        j0 = vlo
        i_min = -vhi
    else:
        j0 = b
        i_min = a
    width = m - i_min + 1
    rows = n - j0 + 1
    g = np.full(width, NEG_INF)
    bits = np.zeros((rows, width), dtype=np.uint8)
    for j in range(j0, n + 1):
        if kind == 0:
            lo = -j if j < vhi else -vhi
            st_i = -j if j <= vhi else i_min - 1
        else:
            lo = a
            st_i = a if j == b else i_min - 1
        left = NEG_INF
        r = j - j0
        for i in range(lo, m + 1):
            ix = i - i_min
            up = g[ix]
            if up >= left:
                best = up
                bits[r, ix] = 1
            else:
                best = left
                bits[r, ix] = 0
            cell = best + _weight(seed, i, j, alpha, rate_lo, rate_hi)
            if i == st_i and cell <= 0.0:
                cell = 0.0
                bits[r, ix] = 2
            g[ix] = cell
            left = cell
    value = g[m - i_min]
    cap = width + rows + 1
    path_i = np.empty(cap, dtype=np.int64)
    path_j = np.empty(cap, dtype=np.int64)
    i = m
    j = n
    k = 0
    while True:
        path_i[k] = i
        path_j[k] = j
        k += 1
        bb = bits[j - j0, i - i_min]
        if bb == 2:
            break
        if bb == 1:
            j -= 1
        else:
            i -= 1
    # reverse in place so the path runs origin -> end
    for q in range(k // 2):
        path_i[q], path_i[k - 1 - q] = path_i[k - 1 - q], path_i[q]
        path_j[q], path_j[k - 1 - q] = path_j[k - 1 - q], path_j[q]
    return value, path_i[:k], path_j[:k], k


@njit(cache=True, nogil=True)
def g_rows(seed, alpha, rate_lo, rate_hi, row_start_i, row_lo, j0,
           i_hi, cap_j0, out):
    """Arrival-time table G over rows j0..j1 (j1 = j0 + nrows - 1).

    row_start_i[j - j0]: the start cell of row j (one per row), or i_hi + 1
    when the row has none.  row_lo[j - j0]: leftmost active cell.  Start
    cells are forced to exactly 0: their weight is the waiting time for a
    jump the dynamics never makes, so it must not be collected (this is the
    TASEP source convention; it differs from the literal path-sum definition
    only on start sets that are not antichains, e.g. packed configurations).
    Rows cap_j0..j1 are captured into out[j - cap_j0, i - i_lo_of_capture],
    where the capture columns span [row_lo.min(), i_hi].  Cells left of a
    row's window keep the prefill of `out` (callers prefill with 0.0: the
    particle was already past those sites at time zero).
    """
    nrows = len(row_start_i)
    i_min = i_hi
    for r in range(nrows):
        if row_lo[r] < i_min:
            i_min = row_lo[r]
    width = i_hi - i_min + 1
    g = np.full(width, NEG_INF)
    for r in range(nrows):
        j = j0 + r
        lo = row_lo[r]
        st_i = row_start_i[r]
        left = NEG_INF
        for i in range(lo, i_hi + 1):
            ix = i - i_min
            up = g[ix]
            best = up if up >= left else left
            cell = best + _weight(seed, i, j, alpha, rate_lo, rate_hi)
            if i == st_i:
                cell = 0.0
            g[ix] = cell
            left = cell
        if j >= cap_j0:
            out[j - cap_j0, lo - i_min:] = g[lo - i_min:]
    return i_min


@njit(cache=True, nogil=True)
def tasep_tail_counts(seeds, alpha, rate_lo, rate_hi, row_start_i, row_lo,
                      j0, m_vals, t):
    """Monte Carlo counts of {G(m, n) <= t} at the top row, over seeds.

    The top row is j0 + len(row_start_i) - 1; m_vals are the queried first
    coordinates.  Returns integer counts per m value.
    """
    nrows = len(row_start_i)
    i_hi = np.max(m_vals)
    i_min = i_hi
    for r in range(nrows):
        if row_lo[r] < i_min:
            i_min = row_lo[r]
    width = i_hi - i_min + 1
    counts = np.zeros(len(m_vals), dtype=np.int64)
    g = np.empty(width)
    for s in range(len(seeds)):
        seed = seeds[s]
        g[:] = NEG_INF
        for r in range(nrows):
            j = j0 + r
            lo = row_lo[r]
            st_i = row_start_i[r]
            left = NEG_INF
            for i in range(lo, i_hi + 1):
                ix = i - i_min
                up = g[ix]
                best = up if up >= left else left
                cell = best + _weight(seed, i, j, alpha, rate_lo, rate_hi)
                if i == st_i:
                    cell = 0.0
                g[ix] = cell
                left = cell
        for q in range(len(m_vals)):
            mq = m_vals[q]
            if mq < row_lo[nrows - 1]:
                counts[q] += 1  # left of the top row's start: passed at t=0
            elif g[mq - i_min] <= t:
                counts[q] += 1
    return counts


_MASK64 = (1 << 64) - 1


def _mix_py(x: int) -> int:
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def weight_scalar(seed: int, i: int, j: int, alpha: float,
                  rate_lo: int = RATE_LO_DEFAULT,
                  rate_hi: int = RATE_HI_DEFAULT) -> float:
    """Python-callable single-cell weight, bit-identical to the kernels
    (libm log, same hash)."""
    h = (seed & _MASK64) ^ ((i & _MASK64) * 0x9E3779B97F4A7C15 & _MASK64) \
        ^ ((j & _MASK64) * 0xC2B2AE3D27D4EB4F & _MASK64)
    h = _mix_py((_mix_py(h) + 0x9E3779B97F4A7C15) & _MASK64)
    u = ((h >> 11) + 0.5) * _INV_2_53
    rate = alpha if rate_lo <= j <= rate_hi else 1.0
    return -math.log(u) / rate
