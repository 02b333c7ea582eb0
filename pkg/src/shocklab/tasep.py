"""Continuous-time TASEP with per-particle jump rates.

Two engines share one law:

* `simulate` -- event-driven stochastic simulation (per-particle exponential
  clocks in a priority queue; suppressed attempts resample, which is exact by
  memorylessness).
* `arrival_table` / `simulate_from_field` -- the waiting-time-field
  construction: with omega_{i,j} the waiting time of particle j for its jump
  into site i-j, arrival times satisfy the last-passage recursion
  G(m,n) = max(G(m-1,n), G(m,n-1)) + omega_{m,n}, which makes the
  LPP correspondence pathwise-exact (tested event-for-event).

Labels decrease to the right: x_{n+1}(t) < x_n(t); particle n is blocked by
particle n-1.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _dp
from .errors import ParameterError, UnsupportedICError, WindowOverflowError


# ---------------------------------------------------------------------------
# initial conditions and rate profiles
# ---------------------------------------------------------------------------

HALF_FLAT = "HalfFlat"            # x_n(0) = -2n, n >= 0
SHOCK_F1F1 = "ShockF1F1"          # x_n(0) = -2n, all n
SHOCK_F2F1 = "ShockF2F1"          # x_n(0) = floor(v*ell) - n (n>=1), -2n (n<=0)
SHOCK_F2F2 = "ShockF2F2"          # x_n(0) = -n - floor(beta*ell) (n>=1), -n (-floor(beta*ell)<=n<=0)
FINITE_M = "FiniteM"              # x_j(0) = 2(M-j) (1<=j<=M), M-j (j>M)
TWO_SPEED_STEP = "TwoSpeedStep"   # x_n(0) = -n (n>=1), -2n (n<=0)
STEP = "Step"                     # x_n(0) = -n, n >= 1

_KINDS = (HALF_FLAT, SHOCK_F1F1, SHOCK_F2F1, SHOCK_F2F2, FINITE_M,
          TWO_SPEED_STEP, STEP)


@dataclass(frozen=True)
class InitialCondition:
    kind: str
    ell: float = 0.0
    beta: float = 0.0
    v: float = 0.0
    M: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise UnsupportedICError(f"unknown initial condition {self.kind!r}")
        if self.kind == SHOCK_F2F2 and not (0.0 < self.beta < 1.0):
            raise ParameterError("ShockF2F2 needs beta in (0,1)")
        if self.kind == FINITE_M and self.M < 1:
            raise ParameterError("FiniteM needs M >= 1")

    def label_min(self) -> Optional[int]:
        """Smallest existing label (front-most particle), None if unbounded."""
        if self.kind == HALF_FLAT:
            return 0
        if self.kind in (FINITE_M, STEP):
            return 1
        if self.kind == SHOCK_F2F2:
            return -math.floor(self.beta * self.ell)
        return None

    def has_label(self, n: int) -> bool:
        lo = self.label_min()
        return lo is None or n >= lo

    def position0(self, n: int) -> int:
        if not self.has_label(n):
            raise ParameterError(f"label {n} does not exist for {self.kind}")
        k = self.kind
        if k == HALF_FLAT or k == SHOCK_F1F1:
            return -2 * n
        if k == TWO_SPEED_STEP:
            return -n if n >= 1 else -2 * n
        if k == STEP:
            return -n
        if k == SHOCK_F2F1:
            return math.floor(self.v * self.ell) - n if n >= 1 else -2 * n
        if k == SHOCK_F2F2:
            return -n - math.floor(self.beta * self.ell) if n >= 1 else -n
        # FINITE_M
        return 2 * (self.M - n) if n <= self.M else self.M - n

    def sa_point(self, n: int) -> tuple[int, int]:
        """Start point (n + x_n(0), n) of the LPP representation."""
        return (n + self.position0(n), n)

    def label_floor(self, m_hi: int) -> int:
        """Smallest label whose LPP start coordinate is <= m_hi (rows below
        cannot touch cells with i <= m_hi, so truncating there is exact)."""
        lo = self.label_min()
        if lo is not None:
            if self.kind == FINITE_M:
                return max(1, 2 * self.M - m_hi)
            return lo
        # unbounded kinds all have u_j = -j for j <= 0
        return min(0, -m_hi)

    def default_rates(self, alpha: float) -> "RateProfile":
        if self.kind == FINITE_M:
            return RateProfile.finite_m(alpha, self.M)
        if self.kind in (HALF_FLAT, STEP) or alpha == 1.0:
            return RateProfile.homogeneous()
        return RateProfile.two_speed(alpha)


@dataclass(frozen=True)
class RateProfile:
    """Map label -> jump rate, encoded as 'rate alpha on labels in
    [slow_lo, slow_hi], rate 1 elsewhere'."""
    alpha: float = 1.0
    slow_lo: int = _dp.RATE_LO_DEFAULT
    slow_hi: int = _dp.RATE_HI_DEFAULT

    def __post_init__(self):
        if not (self.alpha > 0.0):
            raise ParameterError("jump rates must be positive")

    @classmethod
    def two_speed(cls, alpha: float) -> "RateProfile":
        """v_n = 1 for n >= 1, v_n = alpha for n <= 0."""
        return cls(alpha=alpha)

    @classmethod
    def finite_m(cls, alpha: float, M: int) -> "RateProfile":
        """v_j = alpha for 1 <= j <= M, v_j = 1 for j > M."""
        return cls(alpha=alpha, slow_lo=1, slow_hi=M)

    @classmethod
    def homogeneous(cls) -> "RateProfile":
        return cls(alpha=1.0)

    def rate(self, n: int) -> float:
        return self.alpha if self.slow_lo <= n <= self.slow_hi else 1.0


@dataclass
class Trajectory:
    """Recorded jump events per tracked particle."""
    horizon: float
    initial: dict[int, int]
    events: dict[int, list[tuple[float, int]]]

    def position_at(self, n: int, t: float) -> int:
        if t > self.horizon:
            raise ParameterError("query beyond trajectory horizon")
        pos = self.initial[n]
        for tt, x in self.events.get(n, ()):
            if tt <= t:
                pos = x
            else:
                break
        return pos

    def positions_at(self, t: float) -> dict[int, int]:
        return {n: self.position_at(n, t) for n in self.initial}

    def check_exclusion(self) -> None:
        """Assert order preservation at every event time."""
        times = sorted({tt for evs in self.events.values() for tt, _ in evs})
        labels = sorted(self.initial)
        for t in times:
            pos = [self.position_at(n, t) for n in labels]
            for a, b in zip(pos[1:], pos[:-1]):
                if a >= b:
                    raise AssertionError("exclusion/order violated")

    def to_csv(self, path: str) -> None:
        with open(path, "w") as f:
            f.write("time,particle,position\n")
            for n in sorted(self.events):
                for tt, x in self.events[n]:
                    f.write(f"{tt!r},{n},{x}\n")


# ---------------------------------------------------------------------------
# stochastic event-driven simulation
# ---------------------------------------------------------------------------


def _auto_window(ic: InitialCondition, tracked: list[int], horizon: float,
                 factor: float = 1.0) -> tuple[int, int, int]:
    """Label window [lab_lo, lab_hi] plus the displacement budget used by the
    overflow detector.  Particles ahead are included until their initial
    position exceeds the tracked particles' maximal reach."""
    reach = math.ceil(factor * (horizon + 10.0 * math.sqrt(horizon) + 64.0))
    lab_hi = max(tracked)
    n0 = min(tracked)
    x0 = ic.position0(n0)
    lab_lo = n0
    floor_lab = ic.label_min()
    while True:
        nxt = lab_lo - 1
        if floor_lab is not None and nxt < floor_lab:
            break
        if ic.position0(nxt) > x0 + reach:
            break
        lab_lo = nxt
    return lab_lo, lab_hi, reach


def simulate(ic: InitialCondition, rates: RateProfile, horizon: float,
             tracked: Iterable[int], seed: int,
             window: Optional[tuple[int, int]] = None,
             debug_checks: bool = False, max_retries: int = 3) -> Trajectory:
    """Statistically exact continuous-time TASEP via resampling clocks.

    Only particles inside the label window are instantiated; the window is
    enlarged and the run retried when a tracked particle exhausts its
    displacement budget (an overflow of the dependency cone).
    """
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    tracked = sorted(set(int(n) for n in tracked))
    for n in tracked:
        if not ic.has_label(n):
            raise ParameterError(f"tracked label {n} does not exist")
    factor = 1.0
    for attempt in range(max_retries + 1):
        if window is not None:
            lab_lo, lab_hi = window
            budget = None
        else:
            lab_lo, lab_hi, budget = _auto_window(ic, tracked, horizon, factor)
        traj, overflow = _run_stochastic(ic, rates, horizon, tracked, seed,
                                         lab_lo, lab_hi, budget)
        if not overflow:
            if debug_checks:
                traj.check_exclusion()
            return traj
        if window is not None:
            raise WindowOverflowError("explicit window overflowed")
        factor *= 2.0
    raise WindowOverflowError(f"window retries exceeded ({max_retries})")


def _run_stochastic(ic, rates, horizon, tracked, seed, lab_lo, lab_hi, budget):
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    labels = list(range(lab_lo, lab_hi + 1))
    pos = {n: ic.position0(n) for n in labels}
    tracked_set = set(tracked)
    events: dict[int, list[tuple[float, int]]] = {n: [] for n in tracked_set}
    jumps = {n: 0 for n in tracked_set}
    heap = []
    for n in labels:
        heapq.heappush(heap, (gen.exponential(1.0 / rates.rate(n)), n))
    while heap:
        t, n = heapq.heappop(heap)
        if t > horizon:
            break
        target = pos[n] + 1
        ahead = n - 1
        if ahead in pos and pos[ahead] == target:
            pass  # suppressed; clock resampled below (memoryless)
        else:
            pos[n] = target
            if n in tracked_set:
                events[n].append((t, target))
                jumps[n] += 1
                if budget is not None and jumps[n] >= budget - 8:
                    return None, True
        heapq.heappush(heap, (t + gen.exponential(1.0 / rates.rate(n)), n))
    initial = {n: ic.position0(n) for n in tracked_set}
    return Trajectory(horizon=horizon, initial=initial, events=events), False


# ---------------------------------------------------------------------------
# waiting-time-field construction (pathwise-exact LPP link)
# ---------------------------------------------------------------------------


def _field_params(rates: RateProfile) -> tuple[float, int, int]:
    return rates.alpha, rates.slow_lo, rates.slow_hi


def simulate_from_field(seed: int, ic: InitialCondition, rates: RateProfile,
                        horizon: float, labels: tuple[int, int]) -> Trajectory:
    """Deterministic TASEP consuming field weights: particle j's waiting time
    for its jump into site y starts once it sits at y-1 *and* particle j-1
    has entered y+1, and equals omega_{y+j, j}.  Event-for-event equal to the
    arrival-time table built from the same seed."""
    lab_lo, lab_hi = labels
    alpha, rlo, rhi = _field_params(rates)
    pos = {n: ic.position0(n) for n in range(lab_lo, lab_hi + 1)}
    arrive = {(n, pos[n]): 0.0 for n in pos}
    events: dict[int, list[tuple[float, int]]] = {n: [] for n in pos}
    heap = []

    def try_schedule(n, now_known):
        y = pos[n] + 1
        ta = arrive[(n, y - 1)]
        ahead = n - 1
        if ahead in pos:
            if pos[ahead] < y + 1:
                return  # blocker has not vacated; wait for its arrival event
            # 0.0 when the blocker started beyond y+1 (site free from t=0)
            tb = arrive.get((ahead, y + 1), 0.0)
        else:
            tb = 0.0
        w = _dp.weight_scalar(seed, y + n, n, alpha, rlo, rhi)
        heapq.heappush(heap, (max(ta, tb) + w, n, y))

    for n in sorted(pos):
        try_schedule(n, 0.0)
    while heap:
        t, n, y = heapq.heappop(heap)
        if t > horizon:
            break
        pos[n] = y
        arrive[(n, y)] = t
        events[n].append((t, y))
        try_schedule(n, t)
        follower = n + 1
        if follower in pos and pos[follower] == y - 2:
            # the site the follower wants is y-1; it unblocks now that n
            # has entered y
            try_schedule(follower, t)
    initial = {n: ic.position0(n) for n in range(lab_lo, lab_hi + 1)}
    return Trajectory(horizon=horizon, initial=initial, events=events)


@dataclass
class ArrivalTable:
    """G(m, n) over captured rows; G(m,n) <= t iff x_n(t) + n >= m."""
    ic: InitialCondition
    rates: RateProfile
    seed: int
    n_lo: int
    n_hi: int
    m_lo: int
    m_hi: int
    rows: np.ndarray  # rows[n - n_lo, m - m_lo]

    def G(self, m: int, n: int) -> float:
        if not (self.n_lo <= n <= self.n_hi):
            raise ParameterError(f"row {n} not captured")
        if m < self.m_lo:
            return 0.0
        if m > self.m_hi:
            raise ParameterError(f"column {m} not captured")
        return float(self.rows[n - self.n_lo, m - self.m_lo])

    def position_at(self, n: int, t: float) -> int:
        row = self.rows[n - self.n_lo]
        k = int(np.searchsorted(row, t, side="right"))
        if k == len(row):
            raise WindowOverflowError("table too narrow for this query time")
        return self.m_lo + k - 1 - n

    def positions_at(self, t: float) -> np.ndarray:
        k = (self.rows <= t).sum(axis=1)
        if np.any(k == self.rows.shape[1]):
            raise WindowOverflowError("table too narrow for this query time")
        return self.m_lo + k - 1 - np.arange(self.n_lo, self.n_hi + 1)


def arrival_table(ic: InitialCondition, rates: RateProfile, seed: int,
                  n_hi: int, m_hi: int, n_lo: Optional[int] = None) -> ArrivalTable:
    """Build the arrival-time table for rows up to n_hi and columns up to
    m_hi; the start set is truncated exactly at the reachability cone."""
    j0 = ic.label_floor(m_hi)
    n_lo_eff = j0 if n_lo is None else max(n_lo, j0)
    if n_hi < n_lo_eff:
        raise ParameterError("empty row range")
    starts = np.array([ic.sa_point(j)[0] for j in range(j0, n_hi + 1)],
                      dtype=np.int64)
    row_lo = np.minimum.accumulate(starts)
    if np.any(starts[:-1] < starts[1:]):
        raise UnsupportedICError("initial condition is not order-preserving")
    m_lo = int(row_lo.min())
    out = np.zeros((n_hi - n_lo_eff + 1, m_hi - m_lo + 1))
    alpha, rlo, rhi = _field_params(rates)
    _dp.g_rows(np.uint64(seed), alpha, rlo, rhi, starts, row_lo, j0,
               m_hi, n_lo_eff, out)
    return ArrivalTable(ic=ic, rates=rates, seed=seed, n_lo=n_lo_eff,
                        n_hi=n_hi, m_lo=m_lo, m_hi=m_hi, rows=out)


def arrival_times_from_field(field, ic: InitialCondition, n_hi: int,
                             m_hi: int) -> ArrivalTable:
    """Spec-facing wrapper taking a WeightField (seed + region rule)."""
    if field.region.rule is not None:
        raise UnsupportedICError("custom region rules are not expressible "
                                 "as TASEP jump rates")
    rates = (RateProfile.homogeneous() if field.region.alpha == 1.0
             else RateProfile.two_speed(field.region.alpha))
    return arrival_table(ic, rates, field.seed, n_hi, m_hi)


def tail_probability_mc(ic: InitialCondition, rates: RateProfile, n: int,
                        t: float, s_values, samples: int, seed: int,
                        workers: int = 1) -> np.ndarray:
    """Monte Carlo estimate of P(x_n(t) > s) for each s, via the exact
    arrival-time identity x_n(t) > s  <=>  G(s + n + 1, n) <= t."""
    s_arr = np.asarray(s_values, dtype=np.int64)
    m_vals = s_arr + n + 1
    m_hi = int(m_vals.max())
    j0 = ic.label_floor(m_hi)
    starts = np.array([ic.sa_point(j)[0] for j in range(j0, n + 1)],
                      dtype=np.int64)
    row_lo = np.minimum.accumulate(starts)
    alpha, rlo, rhi = _field_params(rates)
    from .rng import derive_seed
    seeds = np.array([derive_seed(seed, k) for k in range(samples)],
                     dtype=np.uint64)
    if workers <= 1:
        counts = _dp.tasep_tail_counts(seeds, alpha, rlo, rhi, starts, row_lo,
                                       j0, m_vals, float(t))
    else:
        chunks = np.array_split(seeds, workers * 4)
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(
                lambda c: _dp.tasep_tail_counts(c, alpha, rlo, rhi, starts,
                                                row_lo, j0, m_vals, float(t)),
                [c for c in chunks if len(c)]))
        counts = np.sum(parts, axis=0)
    return counts / float(samples)


# ---------------------------------------------------------------------------
# density profiles
# ---------------------------------------------------------------------------


def density_from_positions(positions, bin_width: int):
    """Histogram of occupation fraction vs position; bins partition the
    occupied window.  Returns (bin_centers, density)."""
    if bin_width < 1:
        raise ParameterError("bin_width must be >= 1")
    pos = np.sort(np.asarray(positions, dtype=np.int64))
    lo, hi = int(pos[0]), int(pos[-1])
    nbins = (hi - lo) // bin_width + 1
    edges = lo + bin_width * np.arange(nbins + 1)
    counts, _ = np.histogram(pos, bins=edges)
    centers = edges[:-1] + (bin_width - 1) / 2.0
    return centers, counts / float(bin_width)


def density_profile(traj: Trajectory, t: float, bin_width: int):
    """Density profile of a trajectory's tracked particles at time t."""
    positions = list(traj.positions_at(t).values())
    return density_from_positions(positions, bin_width)
