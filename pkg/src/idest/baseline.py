"""Comparison estimators: Levina-Bickel MLE, its inverse-averaged variant,
correlation dimension and log-log k-NN regression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import (
    DegenerateFit,
    DegenerateNeighborhood,
    InsufficientFitPoints,
    InvalidConfig,
    KTooLarge,
)
from .knn import log_distance_ratios, log_distance_ratios_all
from .report import EstimateReport


@dataclass(frozen=True)
class LbConfig:
    k1: int
    k2: int

    def validate(self, table):
        if not (2 <= self.k1 <= self.k2):
            raise InvalidConfig(f"need 2 <= k1 <= k2, got k1={self.k1}, k2={self.k2}")
        if self.k2 > table.k_max:
            raise KTooLarge(f"k too large: k2={self.k2} exceeds table k_max={table.k_max}")


@dataclass(frozen=True)
class CorrDimConfig:
    """Radius grid for the correlation dimension.

    The grid holds ``num_radii`` log-spaced radii between the 1st and 99th
    percentile of pairwise distances. The slope is fitted on the grid points
    whose fractional position along the grid lies in
    ``[fit_lo_quantile, fit_hi_quantile]``.
    """

    num_radii: int = 32
    fit_lo_quantile: float = 0.10
    fit_hi_quantile: float = 0.50

    def validate(self):
        if self.num_radii < 4:
            raise InvalidConfig(f"num_radii must be >= 4, got {self.num_radii}")
        if not (0.0 <= self.fit_lo_quantile < self.fit_hi_quantile <= 1.0):
            raise InvalidConfig(
                f"need 0 <= fit_lo_quantile < fit_hi_quantile <= 1, got "
                f"{self.fit_lo_quantile}, {self.fit_hi_quantile}"
            )


def lb_pointwise(table, point, k):
    """Levina-Bickel estimate ``(k - 1) / S_k(x)`` at one point."""
    s = log_distance_ratios(table, point, k)
    if s == 0.0:
        raise DegenerateNeighborhood(point, f"all of the first {k} neighbor distances of point {point} are equal")
    return (k - 1) / s


def lb_pointwise_all(table, k):
    """Vectorized :func:`lb_pointwise` over every point of ``table``."""
    s = log_distance_ratios_all(table, k)
    _raise_on_zero(s, k)
    return (k - 1) / s


def _raise_on_zero(s, k):
    zero = np.flatnonzero(s == 0.0)
    if zero.size:
        p = int(zero[0])
        raise DegenerateNeighborhood(p, f"all of the first {k} neighbor distances of point {p} are equal")


def lb_estimate(table, cfg):
    """Average ``m_k(x)`` over ``k in [k1, k2]`` per point, then over points."""
    cfg.validate(table)
    acc = np.zeros(table.n)
    for k in range(cfg.k1, cfg.k2 + 1):
        acc += lb_pointwise_all(table, k)
    per_point = acc / (cfg.k2 - cfg.k1 + 1)
    return EstimateReport.from_per_point(per_point, method="lb-mle")


def inverse_mle_estimate(table, k):
    """Global estimate from averaging ``1/m_k(x)`` over points at fixed ``k``.

    Equivalent to the harmonic mean of the pointwise Levina-Bickel values.
    """
    s = log_distance_ratios_all(table, k)
    _raise_on_zero(s, k)
    return 1.0 / float(np.mean(s / (k - 1)))


def correlation_integral(cloud, r):
    """Fraction of point pairs strictly closer than ``r``."""
    if not r > 0:
        raise InvalidConfig(f"radius must be positive, got {r!r}")
    dist = np.sort(pdist(cloud.points))
    return _integral_from_sorted(dist, np.asarray([r], dtype=float))[0]


def _integral_from_sorted(sorted_dist, radii):
    return np.searchsorted(sorted_dist, radii, side="left") / sorted_dist.size


def _ols_slope(x, y):
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def correlation_dimension(cloud, cfg=None):
    """Slope of ``log C_n(r)`` against ``log r`` over the configured window."""
    cfg = cfg or CorrDimConfig()
    cfg.validate()
    dist = np.sort(pdist(cloud.points))
    positive = dist[dist > 0]
    if positive.size < 2 or np.unique(cloud.points, axis=0).shape[0] < 3:
        raise InsufficientFitPoints("correlation dimension needs at least 3 distinct points")
    lo, hi = np.quantile(dist, [0.01, 0.99])
    lo = max(lo, positive[0])
    if not hi > lo:
        raise InsufficientFitPoints("pairwise distances span no usable radius range")
    radii = np.geomspace(lo, hi, cfg.num_radii)
    pos = np.linspace(0.0, 1.0, cfg.num_radii)
    window = (pos >= cfg.fit_lo_quantile - 1e-12) & (pos <= cfg.fit_hi_quantile + 1e-12)
    c = _integral_from_sorted(dist, radii)
    use = window & (c > 0)
    if np.count_nonzero(use) < 2:
        raise InsufficientFitPoints(f"only {np.count_nonzero(use)} usable radii in the fit window")
    return _ols_slope(np.log(radii[use]), np.log(c[use]))


def knn_regression_dimension(table, k1, k2):
    """Inverse slope of ``log mean_i T_k(x_i)`` regressed on ``log k``."""
    if not (2 <= k1 < k2):
        raise InvalidConfig(f"need 2 <= k1 < k2, got k1={k1}, k2={k2}")
    if k2 > table.k_max:
        raise KTooLarge(f"k too large: k2={k2} exceeds table k_max={table.k_max}")
    ks = np.arange(k1, k2 + 1)
    mean_t = table.distances[:, k1 - 1 : k2].mean(axis=0)
    if np.any(mean_t <= 0):
        raise DegenerateFit("mean k-NN distance is zero")
    slope = _ols_slope(np.log(ks), np.log(mean_t))
    if not slope > 0:
        raise DegenerateFit(f"non-positive log-log slope {slope!r}")
    return 1.0 / slope
