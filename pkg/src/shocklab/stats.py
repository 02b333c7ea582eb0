"""Empirical distribution machinery and the acceptance metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass
class EmpiricalCDF:
    """Right-continuous step function of a sorted sample."""
    samples: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float))
        if s.size < 1:
            raise ParameterError("need at least one sample")
        self.samples = s

    @property
    def count(self) -> int:
        return int(self.samples.size)

    def __call__(self, x):
        return np.searchsorted(self.samples, x, side="right") / self.count


def ks_distance(ecdf: EmpiricalCDF, model) -> float:
    """sup_x |F_hat(x) - F(x)| evaluated at the sample points with both
    one-sided gaps (the sup of the difference of a step function against a
    nondecreasing model is attained there)."""
    n = ecdf.count
    f = np.asarray(model(ecdf.samples), dtype=float)
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def dkw_epsilon(n: int, confidence: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width
    sqrt(ln(2/(1-confidence)) / (2n))."""
    if n < 1:
        raise ParameterError("need n >= 1")
    if not (0.0 < confidence < 1.0):
        raise ParameterError("confidence must lie strictly in (0,1)")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n))
