"""
Codificação de estados, acções e sub-objectivos para as redes.

Grid states are one-hot over every cell (walls included) at row·width + col;
maze states (x, y, vx, vy) are scaled by the map extent and the speed bound.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.exceptions import ShapeMismatchError
from gridworlds.services.grid import GridSpec
from gridworlds.services.kinematic import MazeSpec


def one_hot(indices, width: int) -> np.ndarray:
    indices = np.atleast_1d(np.asarray(indices, dtype=int))
    if np.any(indices < 0) or np.any(indices >= width):
        raise ShapeMismatchError(f"Índice fora de [0, {width}): {indices.tolist()}")
    out = np.zeros((indices.size, width))
    out[np.arange(indices.size), indices] = 1.0
    return out


@dataclass(frozen=True)
class Encoder:
    spec: GridSpec | MazeSpec

    @property
    def discrete(self) -> bool:
        return isinstance(self.spec, GridSpec)

    @property
    def state_width(self) -> int:
        return self.spec.width * self.spec.height if self.discrete else 4

    @property
    def action_width(self) -> int:
        return 4 if self.discrete else 2

    def states(self, states) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        if states.ndim == 1:
            states = states[None, :]
        if self.discrete:
            rows, cols = states[:, 0].astype(int), states[:, 1].astype(int)
            if np.any((rows < 0) | (rows >= self.spec.height) | (cols < 0) | (cols >= self.spec.width)):
                raise ShapeMismatchError("Estado fora da grelha")
            return one_hot(rows * self.spec.width + cols, self.state_width)
        if states.shape[1] != 4:
            raise ShapeMismatchError(f"Estado contínuo com {states.shape[1]} componentes, esperado 4")
        scale = np.array([self.spec.width, self.spec.height, self.spec.v_max, self.spec.v_max])
        return states / scale

    def actions(self, actions) -> np.ndarray:
        if self.discrete:
            return one_hot(actions, 4)
        actions = np.asarray(actions, dtype=float)
        if actions.ndim == 1:
            actions = actions[None, :]
        if actions.shape[1] != 2:
            raise ShapeMismatchError(f"Força com {actions.shape[1]} componentes, esperado 2")
        return actions

    @staticmethod
    def subgoals(ks, K: int) -> np.ndarray:
        """k ∈ {1..K} → one-hot at k−1."""
        return one_hot(np.asarray(ks, dtype=int) - 1, K)


def encode(spec: GridSpec | MazeSpec, state, action=None, subgoal: int | None = None, K: int | None = None) -> np.ndarray:
    """Single feature vector: state ⊕ action ⊕ subgoal, each part optional after the state."""
    encoder = Encoder(spec)
    parts = [encoder.states([state])[0]]
    if action is not None:
        parts.append(encoder.actions([action])[0])
    if subgoal is not None:
        if K is None:
            raise ShapeMismatchError("K é obrigatório para codificar o sub-objectivo")
        parts.append(Encoder.subgoals([subgoal], K)[0])
    return np.concatenate(parts)
