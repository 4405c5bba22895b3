"""Curvas de aprendizagem: pontos de avaliação, média móvel e iterações até convergir."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError, EmptySeriesError

SMOOTHING_WINDOW = 50
CONVERGED = 0.99


@dataclass(frozen=True)
class CurvePoint:
    iteration: int
    success: float
    mean_steps: float

    def as_dict(self) -> dict:
        return {"iteration": self.iteration, "success": self.success, "mean_steps": self.mean_steps}


def moving_average(values, window: int = SMOOTHING_WINDOW) -> np.ndarray:
    """Trailing mean; the first window−1 entries average the available prefix."""
    if window < 1:
        raise ConfigError(f"window deve ser >= 1: {window}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptySeriesError("Série vazia")
    return np.array([values[max(0, i - window + 1):i + 1].mean() for i in range(values.size)])


def smooth_curve(points: list[CurvePoint], window: int = SMOOTHING_WINDOW) -> list[CurvePoint]:
    if not points:
        raise EmptySeriesError("Curva vazia")
    success = moving_average([p.success for p in points], window)
    steps = moving_average([p.mean_steps for p in points], window)
    return [
        CurvePoint(p.iteration, float(s), float(m))
        for p, s, m in zip(points, success, steps)
    ]


def iterations_to_convergence(
    points: list[CurvePoint],
    criterion: float = CONVERGED,
    window: int = SMOOTHING_WINDOW,
) -> int | None:
    """First iteration from which the smoothed success stays >= criterion; None if never."""
    smoothed = smooth_curve(points, window)
    first = None
    for point in smoothed:
        if point.success >= criterion:
            if first is None:
                first = point.iteration
        else:
            first = None
    return first
