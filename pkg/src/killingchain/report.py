"""Residual reports shared by every check."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import ORIENTATION, SIGNATURE

CONVENTIONS = {
    "signature": SIGNATURE,
    "orientation": ORIENTATION,
    "units": "geometric (Ricci - R g/2 = T, no 8*pi; G = c = 1)",
}

PASS = "pass"
FAIL = "fail"
GAUGE_VIOLATED = "gauge-violated"
IDENTITY_GAP = "identity-gap"


@dataclass
class ResidualReport:
    """Per-point residuals of one check.

    ``status`` is ``pass`` or ``fail`` from ``max <= tolerance`` unless a
    check sets one of the diagnostic states (``gauge-violated``,
    ``identity-gap``).  ``table`` holds optional auxiliary rows, e.g. a
    Richardson extrapolation table; ``fields`` holds evaluable fields and is
    never serialized.
    """

    check_id: str
    scenario: str
    killing_field: str
    points: np.ndarray
    residuals: np.ndarray
    tolerance: float
    status: str = ""
    chart: str = ""
    notes: list = field(default_factory=list)
    table: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict, repr=False)
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float)).reshape(-1, 4)
        self.residuals = np.asarray(self.residuals, dtype=float).reshape(-1)
        if self.residuals.shape[0] != self.points.shape[0]:
            raise ValueError("one residual per point expected")
        if np.any(self.residuals < 0) or np.any(np.isnan(self.residuals)):
            raise ValueError("residuals must be non-negative numbers")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.status:
            self.status = PASS if self.within_tolerance else FAIL

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0

    @property
    def mean_residual(self) -> float:
        return float(np.mean(self.residuals)) if self.residuals.size else 0.0

    @property
    def within_tolerance(self) -> bool:
        return self.max_residual <= self.tolerance

    @property
    def passed(self) -> bool:
        return self.status == PASS


def pointwise_norm(values) -> np.ndarray:
    """Max absolute component per point of an ``(N, ...)`` array."""
    v = np.asarray(values, dtype=float)
    return np.max(np.abs(v.reshape(v.shape[0], -1)), axis=1)
