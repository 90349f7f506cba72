"""k-sweeps comparing every estimator on one cloud, with CSV output."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import gaussian_kde

from .baseline import (
    CorrDimConfig,
    LbConfig,
    correlation_dimension,
    inverse_mle_estimate,
    knn_regression_dimension,
    lb_estimate,
    lb_pointwise_all,
)
from .datasets import format_float
from .errors import IdestError, InvalidConfig, KTooLarge
from .knn import build_neighbor_table, worker_count
from .regularized import RegularizedConfig, run_regularized

METHODS = ("reg-mle", "lb-mle", "inv-mle", "corr-dim", "knn-reg")
CSV_HEADER = ("method", "k", "aggregate", "variance", "converged", "seconds")


@dataclass(frozen=True)
class SweepRow:
    method: str
    k: int | None
    aggregate: float | None
    variance: float | None
    converged: bool
    seconds: float = 0.0
    error: str = ""

    def csv_fields(self):
        return (
            self.method,
            "" if self.k is None else str(self.k),
            _fmt(self.aggregate),
            _fmt(self.variance),
            "true" if self.converged else "false",
            format(self.seconds, ".6f"),
        )


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format_float(x)


@dataclass
class SweepResult:
    rows: list
    metadata: dict = field(default_factory=dict)

    def get(self, method, k=None):
        for row in self.rows:
            if row.method == method and row.k == k:
                return row
        raise KeyError((method, k))

    def by_method(self, method):
        return [r for r in self.rows if r.method == method]

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_fields())

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def estimate_cell(table, cloud, method, k, overrides=None):
    """Run one estimator at one ``k``.

    Returns ``(aggregate, per_point, converged)``; ``per_point`` is None for
    methods that only produce a global value.
    """
    overrides = dict(overrides or {})
    if method == "reg-mle":
        report = run_regularized(table, RegularizedConfig(k=k, **overrides))
        return report.aggregate, report.per_point, report.converged
    if method == "lb-mle":
        k1 = overrides.get("k1", k)
        report = lb_estimate(table, LbConfig(k1=k1, k2=k))
        return report.aggregate, report.per_point, True
    if method == "inv-mle":
        # pointwise values are the ones whose inverses get averaged
        per_point = lb_pointwise_all(table, k)
        return inverse_mle_estimate(table, k), per_point, True
    if method == "knn-reg":
        k1 = overrides.get("k1", max(2, k // 2))
        return knn_regression_dimension(table, k1, k), None, True
    if method == "corr-dim":
        return correlation_dimension(cloud, CorrDimConfig(**overrides)), None, True
    raise InvalidConfig(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def _variance(per_point):
    if per_point is None or len(per_point) < 2:
        return None
    return float(np.var(per_point, ddof=1))


def _run_cell(table, cloud, method, k, overrides):
    start = time.perf_counter()
    try:
        aggregate, per_point, converged = estimate_cell(table, cloud, method, k, overrides)
    except IdestError as exc:
        return SweepRow(method, k, None, None, False, time.perf_counter() - start, str(exc))
    return SweepRow(method, k, aggregate, _variance(per_point), converged, time.perf_counter() - start)


def sweep(cloud, methods, k_min, k_max, configs=None, table=None):
    """Evaluate every method at every ``k`` in ``[k_min, k_max]``.

    One neighbor table built at ``k_max`` is shared by all cells.
    ``corr-dim`` does not depend on ``k`` and contributes one row with an
    empty ``k``. A cell whose estimator raises is kept as a row with no
    aggregate and ``converged=False``. Rows are ordered by method name, then
    ``k``, independent of completion order.
    """
    methods = sorted(set(methods))
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise InvalidConfig(f"unknown method(s) {', '.join(unknown)}; choose from {', '.join(METHODS)}")
    if k_min < 2 or k_min > k_max:
        raise InvalidConfig(f"need 2 <= k_min <= k_max, got k_min={k_min}, k_max={k_max}")
    if k_max > cloud.n - 1:
        raise KTooLarge(f"k too large: k_max={k_max} but the cloud has {cloud.n} points")
    configs = configs or {}
    if table is None:
        table = build_neighbor_table(cloud, k_max)

    cells = []
    for method in methods:
        if method == "corr-dim":
            cells.append((method, None))
        else:
            cells.extend((method, k) for k in range(k_min, k_max + 1))

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        futures = [pool.submit(_run_cell, table, cloud, m, k, configs.get(m)) for m, k in cells]
        rows = [f.result() for f in futures]

    return SweepResult(
        rows=rows,
        metadata={
            "n": cloud.n,
            "d": cloud.d,
            "methods": methods,
            "k_min": k_min,
            "k_max": k_max,
            "configs": {m: dict(v) for m, v in configs.items()},
            "seconds": {f"{r.method}@{'' if r.k is None else r.k}": r.seconds for r in rows},
            "errors": {f"{r.method}@{'' if r.k is None else r.k}": r.error for r in rows if r.error},
        },
    )


def estimate_modes(values, grid_size=512):
    """Local maxima of a Gaussian KDE of ``log(values)``, highest first.

    Per-point dimension estimates have a spread proportional to their level,
    so modes are located on a log scale. Returns ``(location, density)``
    pairs with locations mapped back to the original scale.
    """
    logs = np.log(np.asarray(values, dtype=float))
    kde = gaussian_kde(logs)
    grid = np.linspace(logs.min(), logs.max(), grid_size)
    dens = kde(grid)
    peaks = np.flatnonzero((dens[1:-1] > dens[:-2]) & (dens[1:-1] >= dens[2:])) + 1
    order = peaks[np.argsort(-dens[peaks])]
    return [(float(np.exp(grid[i])), float(dens[i])) for i in order]
