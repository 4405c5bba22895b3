"""
Iteração de valor tabular sobre as grelhas, com a recompensa esparsa base.

The goal is absorbing (V(goal) = 0, the episode ends on arrival), so a cell at
shortest distance d from the goal converges to γ^(d−1).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from gridworlds.services.grid import Action, DiscreteState, GridSpec, grid_step

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TabularPlan:
    cells: tuple[DiscreteState, ...]
    values: np.ndarray
    greedy: np.ndarray
    sweeps: int
    residual: float
    _position: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_position", {cell: i for i, cell in enumerate(self.cells)})

    def index(self, state) -> int:
        return self._position[DiscreteState(*state)]

    def value(self, state) -> float:
        return float(self.values[self.index(state)])

    def action(self, state) -> Action:
        return Action(int(self.greedy[self.index(state)]))

    def value_table(self) -> dict[DiscreteState, float]:
        return {cell: float(v) for cell, v in zip(self.cells, self.values)}


def _tables(spec: GridSpec):
    cells = tuple(spec.free_cells())
    position = {cell: i for i, cell in enumerate(cells)}
    n, n_actions = len(cells), len(Action)
    next_index = np.zeros((n, n_actions), dtype=int)
    rewards = np.zeros((n, n_actions))
    done = np.zeros((n, n_actions))
    for i, cell in enumerate(cells):
        for action in Action:
            state, reward, terminal = grid_step(spec, cell, action)
            next_index[i, action] = position[state]
            rewards[i, action] = reward
            done[i, action] = float(terminal)
    return cells, position, next_index, rewards, done


def value_iteration(spec: GridSpec, gamma: float | None = None, tol: float = 1e-10, max_sweeps: int = 100_000) -> TabularPlan:
    gamma = spec.gamma if gamma is None else gamma
    cells, position, next_index, rewards, done = _tables(spec)
    goal = position[spec.goal]

    values = np.zeros(len(cells))
    residual = np.inf
    sweeps = 0
    while residual >= tol and sweeps < max_sweeps:
        q = rewards + gamma * (1.0 - done) * values[next_index]
        new_values = q.max(axis=1)
        new_values[goal] = 0.0
        residual = float(np.max(np.abs(new_values - values)))
        values = new_values
        sweeps += 1

    if residual >= tol:
        logger.warning(f"Iteração de valor em {spec.name} parou com resíduo {residual:.3e}")

    q = rewards + gamma * (1.0 - done) * values[next_index]
    # np.argmax keeps the first maximum: UP < DOWN < LEFT < RIGHT
    greedy = np.argmax(q, axis=1)
    logger.info(f"Iteração de valor em {spec.name}: {sweeps} varrimentos, resíduo {residual:.3e}")
    return TabularPlan(cells=cells, values=values, greedy=greedy, sweeps=sweeps, residual=residual)


def greedy_rollout(spec: GridSpec, plan: TabularPlan, start=None) -> list[DiscreteState]:
    """States visited by the greedy plan from `start` until goal or horizon."""
    state = DiscreteState(*(start if start is not None else spec.start))
    visited = [state]
    for _ in range(spec.horizon):
        state, _, done = grid_step(spec, state, plan.action(state))
        visited.append(state)
        if done:
            break
    return visited
