"""
Mapa de valores de um learner numa grelha: V(s) por célula e a seta da acção
argmax Q. Walls render as W; the start and goal cells are prefixed with S and G.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError
from gridworlds.services.grid import ARROWS, Action, GridSpec
from learner.services.encoding import Encoder
from learner.services.state import LearnerState, q_values, state_values

WALL = "W"
DELIMITER = ","


@dataclass(frozen=True)
class ValueMap:
    spec: GridSpec
    values: np.ndarray  # (height, width), nan on walls
    actions: np.ndarray  # (height, width), -1 on walls

    def cell_text(self, row: int, col: int, precision: int = 4) -> str:
        if (row, col) in self.spec.walls:
            return WALL
        text = f"{self.values[row, col]:.{precision}f}:{ARROWS[Action(int(self.actions[row, col]))]}"
        if (row, col) == tuple(self.spec.start):
            return f"S:{text}"
        if (row, col) == tuple(self.spec.goal):
            return f"G:{text}"
        return text

    def render(self, precision: int = 4) -> str:
        lines = [
            DELIMITER.join(self.cell_text(r, c, precision) for c in range(self.spec.width))
            for r in range(self.spec.height)
        ]
        return "\n".join(lines) + "\n"

    def value(self, cell) -> float:
        return float(self.values[cell[0], cell[1]])


def export_value_map(learner: LearnerState, spec: GridSpec) -> ValueMap:
    if not isinstance(spec, GridSpec):
        raise ConfigError("O mapa de valores só existe para tarefas discretas")
    cells = spec.free_cells()
    encoded = Encoder(spec).states(cells)
    v = state_values(learner, encoded)
    greedy = np.argmax(q_values(learner, encoded), axis=1)

    values = np.full((spec.height, spec.width), np.nan)
    actions = np.full((spec.height, spec.width), -1, dtype=int)
    for (row, col), value, action in zip(cells, v, greedy):
        values[row, col] = value
        actions[row, col] = action
    return ValueMap(spec=spec, values=values, actions=actions)
