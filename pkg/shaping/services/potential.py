"""
Potencial temporal Φ(t, k) = −(t/T)·(1/k) e a recompensa moldada

    r′ = r + γ·Φ(t+1, k_{t+1}) − Φ(t, k_t).

Both functions accept scalars or numpy arrays; arrays are used by the
randomized oracle sweeps.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError, ShapingError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShapingParams:
    gamma: float
    horizon: int
    schedule_digest: str = ""

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"shaping.gamma deve estar em (0,1): {self.gamma}")
        if self.horizon < 1:
            raise ConfigError(f"shaping.horizon deve ser positivo: {self.horizon}")

    @property
    def gamma_bound(self) -> float:
        return (self.horizon - 1) / self.horizon

    @property
    def boundary_warning(self) -> bool:
        """True when γ ≤ (T−1)/T: non-progress steps are then no longer strictly penalised."""
        return self.gamma <= self.gamma_bound

    def warn_if_boundary(self) -> None:
        if self.boundary_warning:
            logger.warning(
                f"gamma={self.gamma} <= (T-1)/T={self.gamma_bound:.6f}: "
                "a penalização estrita de passos sem progresso não está garantida"
            )


def potential(t, k, horizon: int):
    t_arr = np.asarray(t, dtype=float)
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 1):
        raise ShapingError(f"Índice de progresso inválido (k >= 1): {k!r}")
    if np.any(t_arr < 0) or np.any(t_arr > horizon):
        raise ShapingError(f"Passo temporal fora de [0, {horizon}]: {t!r}")
    value = -(t_arr / horizon) * (1.0 / k_arr)
    return float(value) if value.ndim == 0 else value


def shaped_reward(r, t, k_t, k_next, params: ShapingParams):
    t_arr = np.asarray(t, dtype=float)
    return (
        r
        + params.gamma * potential(t_arr + 1, k_next, params.horizon)
        - potential(t_arr, k_t, params.horizon)
    )


def is_positive_progress(k_t: int, k_next: int) -> bool:
    return k_t < k_next
