from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EstimateReport:
    """Per-point estimates plus their aggregate.

    ``aggregate`` is always the arithmetic mean of ``per_point``. Iterative
    estimators also fill ``iterations_used``, ``converged`` and
    ``gamma_final``; closed-form ones leave the defaults.
    """

    per_point: np.ndarray
    aggregate: float
    method: str = ""
    iterations_used: int = 0
    converged: bool = True
    gamma_final: float = float("nan")
    gamma_history: tuple = ()
    clamp_events: int = 0
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_per_point(cls, per_point, **kwargs):
        per_point = np.asarray(per_point, dtype=np.float64)
        per_point.setflags(write=False)
        return cls(per_point=per_point, aggregate=float(np.mean(per_point)), **kwargs)

    @property
    def variance(self):
        """Unbiased across-point sample variance of ``per_point``."""
        if self.per_point.size < 2:
            return float("nan")
        return float(np.var(self.per_point, ddof=1))
