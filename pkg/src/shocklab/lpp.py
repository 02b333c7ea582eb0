"""Exponential-weight last-passage percolation on Z^2.

Weight sampling, dynamic-programming passage times from point sets, maximizer
backtracking, a brute-force path-enumeration oracle, and the shock-scenario
geometries (two-sided half-line / point start sets with a ray endpoint).

Lattice conventions: points are (i, j); admissible path steps are (1, 0) and
(0, 1); the passage value sums weights over path vertices *excluding* the
start vertex, so a one-point path has value 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from . import _dp
from .errors import GuardError, InfeasibleGeometryError, ParameterError
from .rng import uniform_at

Point = tuple[int, int]

ORACLE_SPAN_LIMIT = 12


@dataclass(frozen=True)
class RegionSpec:
    """Rate field for the weights: rate `alpha` on rows j <= 0, rate 1 above.

    A custom `rule(i, j) -> rate` overrides the default; custom rules are only
    honored by materialized fields (the fast kernels assume the row rule).
    """
    alpha: float = 1.0
    rule: Optional[Callable[[int, int], float]] = None

    def __post_init__(self):
        if not (self.alpha > 0.0):
            raise ParameterError(f"rate alpha must be positive, got {self.alpha}")

    def rate(self, i: int, j: int) -> float:
        if self.rule is not None:
            r = self.rule(i, j)
            if not (r > 0.0):
                raise ParameterError(f"rate({i},{j}) = {r} is not positive")
            return r
        return 1.0 if j >= 1 else self.alpha


@dataclass
class WeightField:
    """Lazy exponential weight field; regenerates bit-identically from
    (seed, bbox, region).  bbox is inclusive: (i0, i1, j0, j1)."""
    region: RegionSpec
    bbox: tuple[int, int, int, int]
    seed: int
    _values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        i0, i1, j0, j1 = self.bbox
        if i1 < i0 or j1 < j0:
            raise ParameterError(f"empty bbox {self.bbox}")

    @property
    def values(self) -> np.ndarray:
        """Materialized weights, values[j - j0, i - i0].

        The default rule goes through the same compiled kernel as the DP
        engines, so field values and engine-internal weights are
        bit-identical."""
        if self._values is None:
            i0, i1, j0, j1 = self.bbox
            if self.region.rule is None:
                self._values = _dp.weights_block(
                    np.uint64(self.seed), i0, i1, j0, j1, self.region.alpha,
                    _dp.RATE_LO_DEFAULT, _dp.RATE_HI_DEFAULT)
            else:
                ii, jj = np.meshgrid(np.arange(i0, i1 + 1),
                                     np.arange(j0, j1 + 1))
                u = uniform_at(self.seed, ii, jj)
                rates = np.vectorize(self.region.rule)(ii, jj).astype(float)
                if np.any(rates <= 0.0):
                    raise ParameterError("custom rule produced a nonpositive rate")
                self._values = -np.log(u) / rates
        return self._values

    def weight(self, i: int, j: int) -> float:
        i0, i1, j0, j1 = self.bbox
        if not (i0 <= i <= i1 and j0 <= j <= j1):
            raise ParameterError(f"({i},{j}) outside bbox {self.bbox}")
        return float(self.values[j - j0, i - i0])

    def contains(self, p: Point) -> bool:
        i0, i1, j0, j1 = self.bbox
        return i0 <= p[0] <= i1 and j0 <= p[1] <= j1

    def to_csv(self, path: str) -> None:
        i0, i1, j0, j1 = self.bbox
        vals = self.values
        with open(path, "w") as f:
            f.write("i,j,weight\n")
            for j in range(j0, j1 + 1):
                for i in range(i0, i1 + 1):
                    f.write(f"{i},{j},{vals[j - j0, i - i0]!r}\n")


def sample_weight_field(region: RegionSpec, bbox: tuple[int, int, int, int],
                        seed: int) -> WeightField:
    """Sample an exponential weight field (lazy; deterministic under seed)."""
    return WeightField(region=region, bbox=bbox, seed=seed)


@dataclass
class PassageResult:
    """Last-passage value with its backtracked maximizer."""
    value: float
    path: list[Point]
    origin: Point

    def path_array(self) -> np.ndarray:
        return np.asarray(self.path, dtype=np.int64)

    def path_to_csv(self, path: str) -> None:
        with open(path, "w") as f:
            f.write("k,i,j\n")
            for k, (i, j) in enumerate(self.path):
                f.write(f"{k},{i},{j}\n")


def _reachable(starts, end: Point) -> bool:
    return any(a <= end[0] and b <= end[1] for a, b in starts)


def last_passage(field: WeightField, starts, end: Point,
                 want_path: bool = True) -> PassageResult:
    """DP last-passage time from a finite start set to `end` on a field.

    Reference implementation on the materialized bbox; start weights are
    excluded.  Tie-breaking in backtracking prefers the (i, j-1) predecessor.
    """
    starts = [tuple(p) for p in starts]
    if not starts:
        raise ParameterError("empty start set")
    if not _reachable(starts, end):
        raise InfeasibleGeometryError(
            f"no start weakly south-west of end {end}")
    for p in starts + [end]:
        if not field.contains(p):
            raise ParameterError(f"point {p} outside field bbox {field.bbox}")
    i0, _, j0, _ = field.bbox
    m, n = end
    start_set = set(starts)
    lo_i = min(a for a, b in starts)
    lo_j = min(b for a, b in starts)
    width = m - lo_i + 1
    vals = field.values
    g = np.full(width, -np.inf)
    choice = np.zeros((n - lo_j + 1, width), dtype=np.uint8)
    for j in range(lo_j, n + 1):
        left = -np.inf
        r = j - lo_j
        for i in range(lo_i, m + 1):
            ix = i - lo_i
            up = g[ix]
            if up >= left:
                best, bit = up, 1
            else:
                best, bit = left, 0
            cell = best + vals[j - j0, i - i0]
            if (i, j) in start_set and cell <= 0.0:
                cell, bit = 0.0, 2
            g[ix] = cell
            choice[r, ix] = bit
            left = cell
    value = float(g[m - lo_i])
    if not np.isfinite(value):
        raise InfeasibleGeometryError(f"end {end} unreachable from starts")
    if not want_path:
        return PassageResult(value=value, path=[end], origin=end)
    path = []
    i, j = m, n
    while True:
        path.append((i, j))
        bit = choice[j - lo_j, i - lo_i]
        if bit == 2:
            break
        if bit == 1:
            j -= 1
        else:
            i -= 1
    path.reverse()
    return PassageResult(value=value, path=path, origin=path[0])


def enumerate_oracle(field: WeightField, start: Point, end: Point) -> float:
    """Exact maximum over all up-right paths by explicit enumeration.

    Guarded to spans <= 12 per direction.  Sums accumulate left-to-right so
    the result is bit-identical to the DP (float addition is commutative and
    max commutes with the monotone suffix additions).
    """
    di = end[0] - start[0]
    dj = end[1] - start[1]
    if di < 0 or dj < 0:
        raise InfeasibleGeometryError(f"end {end} not reachable from {start}")
    if di > ORACLE_SPAN_LIMIT or dj > ORACLE_SPAN_LIMIT:
        raise GuardError(f"oracle span {di}x{dj} exceeds {ORACLE_SPAN_LIMIT}")
    steps = di + dj
    if steps == 0:
        return 0.0
    best = -np.inf
    for right_pos in combinations(range(steps), di):
        i, j = start
        acc = 0.0
        rp = set(right_pos)
        for k in range(steps):
            if k in rp:
                i += 1
            else:
                j += 1
            acc = acc + field.weight(i, j)
        if acc > best:
            best = acc
    return float(best)


# ---------------------------------------------------------------------------
# shock-scenario geometries
# ---------------------------------------------------------------------------

SCENARIOS = ("F1F1", "F2F1", "F2F2")


@dataclass
class Geometry:
    """A named shock scenario: truncated start half-lines plus the endpoint
    ray E(t) = (floor(eta*t), floor(t)) with eta = eta0 + u * t^(-2/3)."""
    scenario: str
    alpha: float
    t: float
    u: float = 0.0
    beta_param: float = 0.0
    truncation_len: Optional[int] = None
    eta0: float = 0.0
    start_plus: list[Point] = field(default_factory=list)
    start_minus: list[Point] = field(default_factory=list)
    # engine encodings: ("diag", v_lo, v_hi) or ("point", a, b)
    plus_spec: tuple = ()
    minus_spec: tuple = ()

    @property
    def eta(self) -> float:
        return self.eta0 + self.u * self.t ** (-2.0 / 3.0)

    @property
    def end(self) -> Point:
        return (math.floor(self.eta * self.t), math.floor(self.t))

    def end_plus(self, nu: float) -> Point:
        """The slow-decorrelation capture point E+ = E - (ceil(t^nu),) * 2."""
        d = math.ceil(self.t ** nu)
        m, n = self.end
        return (m - d, n - d)


def scenario_geometry(scenario: str, alpha: float, t: float, u: float = 0.0,
                      beta_param: float = 0.0, b: float = 0.0,
                      truncation_len: Optional[int] = None) -> Geometry:
    """Build the start sets and endpoint for one of the named scenarios.

    Half-lines are truncated `truncation_len` points past the orthogonal
    projection of E (default ceil(2t)); the DP additionally clips them to the
    reachability cone of E, so the default truncation never changes a value.
    For F2F1/F2F2 the L+ (and F2F2 L-) boundary is reduced to its dominating
    corner point: every path from the dominated segment/column extends
    backward through the corner with nonnegative weights.
    """
    if scenario not in SCENARIOS:
        raise ParameterError(f"unknown scenario {scenario!r}")
    if t <= 0:
        raise ParameterError("t must be positive")
    trunc = math.ceil(2 * t) if truncation_len is None else int(truncation_len)
    geo = Geometry(scenario=scenario, alpha=alpha, t=t, u=u,
                   beta_param=beta_param, truncation_len=trunc)
    if scenario == "F1F1":
        if not (0.0 < alpha < 1.0):
            raise ParameterError("F1F1 needs alpha in (0,1)")
        geo.eta0 = alpha / (2.0 - alpha)
        eta = geo.eta
        vp = math.floor((1.0 - eta) * t / 2.0) + trunc
        vm = math.floor(max(eta - alpha ** 2 / (2.0 - alpha) ** 2, 0.0) * t / 2.0) + trunc
        geo.plus_spec = ("diag", 1, vp)
        geo.minus_spec = ("diag", -vm, 0)
    elif scenario == "F2F1":
        if not (0.0 < alpha < 1.0):
            raise ParameterError("F2F1 needs alpha in (0,1)")
        geo.eta0 = alpha * (3.0 - 2.0 * alpha) / (2.0 - alpha)
        beta0 = 1.0 - geo.eta0
        beta = beta0 + b * t ** (-2.0 / 3.0)
        geo.beta_param = beta
        eta = geo.eta
        corner = (-math.floor(beta * t), 0)
        vm = math.floor(max(eta - alpha ** 2 / (2.0 - alpha) ** 2, 0.0) * t / 2.0) + trunc
        geo.plus_spec = ("point",) + corner
        geo.minus_spec = ("diag", -vm, 0)
    else:  # F2F2
        if beta_param <= 0.0:
            raise ParameterError("F2F2 needs beta_param > 0")
        if alpha != 1.0:
            raise ParameterError("F2F2 is the homogeneous case alpha = 1")
        geo.eta0 = 1.0
        geo.plus_spec = ("point", -math.floor(beta_param * t), 0)
        geo.minus_spec = ("point", 0, -math.floor(beta_param * t))
    geo.start_plus = _spec_points(geo.plus_spec)
    geo.start_minus = _spec_points(geo.minus_spec)
    return geo


def _spec_points(spec: tuple, cap: int = 200000) -> list[Point]:
    if spec[0] == "point":
        return [(spec[1], spec[2])]
    _, v_lo, v_hi = spec
    if v_hi - v_lo > cap:
        raise GuardError("start set too large to materialize")
    return [(-v, v) for v in range(v_lo, v_hi + 1)]


def passage_value(seed: int, alpha: float, spec: tuple, end: Point,
                  capture: Optional[Point] = None,
                  rate_lo: int = _dp.RATE_LO_DEFAULT,
                  rate_hi: int = _dp.RATE_HI_DEFAULT) -> tuple[float, float]:
    """Engine entry: passage value from an encoded start spec to `end`,
    optionally capturing a second interior point on the same field."""
    m, n = end
    cm, cn = capture if capture is not None else (0, 0)
    if spec[0] == "diag":
        args = (0, spec[1], spec[2], 0, 0)
    else:
        args = (1, 0, 0, spec[1], spec[2])
    l, l2 = _dp.lpp_value(np.uint64(seed), float(alpha), rate_lo, rate_hi,
                          *args, m, n, cm, cn, capture is not None)
    if not np.isfinite(l):
        raise InfeasibleGeometryError(f"end {end} unreachable from {spec}")
    return float(l), float(l2)


def passage_path(seed: int, alpha: float, spec: tuple, end: Point,
                 rate_lo: int = _dp.RATE_LO_DEFAULT,
                 rate_hi: int = _dp.RATE_HI_DEFAULT) -> PassageResult:
    """Engine entry: value plus maximizer path (full-table backtrack)."""
    m, n = end
    if spec[0] == "diag":
        args = (0, spec[1], spec[2], 0, 0)
    else:
        args = (1, 0, 0, spec[1], spec[2])
    value, pi, pj, k = _dp.lpp_path(np.uint64(seed), float(alpha), rate_lo,
                                    rate_hi, *args, m, n)
    if not np.isfinite(value):
        raise InfeasibleGeometryError(f"end {end} unreachable from {spec}")
    path = list(zip(pi.tolist(), pj.tolist()))
    return PassageResult(value=float(value), path=path, origin=path[0])


# ---------------------------------------------------------------------------
# crossing probes (no-crossing checks along the ray to E)
# ---------------------------------------------------------------------------


@dataclass
class CrossingProbe:
    """Probe points D_gamma = (floor(gamma*eta*t), floor(gamma*t)) for an
    increasing gamma grid in [0, 1 - t^(beta-1)]."""
    gammas: np.ndarray
    beta_exponent: float
    eta: float
    t: float

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.size and np.any(np.diff(g) <= 0):
            raise ParameterError("gamma grid must be strictly increasing")
        if not (1.0 / 3.0 < self.beta_exponent <= 1.0):
            raise ParameterError("beta exponent must lie in (1/3, 1]")
        self.gammas = g
        self.points = np.stack(
            [np.floor(g * self.eta * self.t).astype(np.int64),
             np.floor(g * self.t).astype(np.int64)], axis=1)


def full_probe(eta: float, t: float, beta_exponent: float) -> CrossingProbe:
    """Probe whose points cover every lattice point attained by D_gamma on
    gamma in [0, 1 - t^(beta-1)]: the gamma grid enumerates all breakpoints
    of the two floor maps."""
    gmax = 1.0 - t ** (beta_exponent - 1.0)
    cands = np.arange(0, math.floor(gmax * t) + 1) / t
    if eta > 0:
        cands = np.concatenate(
            [cands, np.arange(0, math.floor(gmax * eta * t) + 1) / (eta * t)])
    cands = np.unique(cands[cands <= gmax])
    return CrossingProbe(gammas=cands, beta_exponent=beta_exponent,
                         eta=eta, t=t)


def _encode(pts: np.ndarray) -> np.ndarray:
    return (pts[:, 0].astype(np.int64) << np.int64(32)) ^ (
        pts[:, 1].astype(np.int64) & np.int64(0xFFFFFFFF))


def path_hits(result: PassageResult, probe: CrossingProbe) -> np.ndarray:
    """Bitmask over the probe points: True where D is a vertex of the path."""
    path = result.path_array()
    keys = np.sort(_encode(path))
    want = _encode(probe.points)
    idx = np.searchsorted(keys, want)
    idx = np.minimum(idx, len(keys) - 1)
    return keys[idx] == want


def path_hits_any(result: PassageResult, probe: CrossingProbe) -> bool:
    return bool(path_hits(result, probe).any())
