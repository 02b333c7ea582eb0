"""Counter-based random weights on the integer lattice.

Every exponential weight omega_{i,j} is a pure function of (seed, i, j), so a
"field" never has to be materialized: any cell is reproducible by re-hashing
its coordinates.  That is what makes the coupled experiments exact -- the
L+ and L- passage times of one sample literally read the same lattice.

The hash is two rounds of the splitmix64 finalizer over a linear combination
of the coordinates; uniforms are mapped to (0,1) strictly, and exponentials
are drawn by inverse CDF (w = -log(u)/rate).  The numba twin in _dp.py must
stay bit-identical to the vectorized version here (tested).
"""

from __future__ import annotations

import numpy as np

# golden-ratio style odd constants (splitmix64 / xxhash lineage)
_C_I = np.uint64(0x9E3779B97F4A7C15)
_C_J = np.uint64(0xC2B2AE3D27D4EB4F)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

_INV_2_53 = 2.0 ** -53


def _mix64(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def hash_lattice(seed: int, i, j) -> np.ndarray:
    """64-bit hash of lattice coordinates under a seed (vectorized)."""
    ii = np.asarray(i, dtype=np.int64).astype(np.uint64)
    jj = np.asarray(j, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        h = np.uint64(seed) ^ (ii * _C_I) ^ (jj * _C_J)
        return _mix64(_mix64(h) + _C_I)

def uniform_at(seed: int, i, j) -> np.ndarray:
    """Uniform(0,1) variate for cell (i,j), strictly inside the interval."""
    h = hash_lattice(seed, i, j)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def exponential_at(seed: int, i, j, rate) -> np.ndarray:
    """Exponential(rate) waiting time at cell (i,j); mean 1/rate."""
    return -np.log(uniform_at(seed, i, j)) / rate


def derive_seed(master: int, index: int) -> int:
    """Deterministic per-sample child seed, independent of worker scheduling."""
    with np.errstate(over="ignore"):
        h = _mix64(_mix64(np.uint64(master) ^ (np.uint64(np.int64(index)) * _C_J)) + _C_I)
    return int(h)
