"""
Políticas de comportamento para gerar datasets e servir de referência.

Every policy is batched: `policy(states, goals) -> actions`, one action per
state. The learned policies of the learner app follow the same call shape.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from gridworlds.services.grid import GridSpec
from gridworlds.services.kinematic import MazeSpec
from learner.services.value_iteration import TabularPlan, value_iteration


class TabularExpert:
    """Greedy action of a value-iteration plan (shortest path on the grid)."""

    def __init__(self, plan: TabularPlan):
        self.plan = plan

    @classmethod
    def for_spec(cls, spec: GridSpec) -> TabularExpert:
        return cls(value_iteration(spec))

    def __call__(self, states, goals=None) -> list[int]:
        return [int(self.plan.action(s)) for s in states]


class RandomPolicy:
    def __init__(self, env, rng: np.random.Generator):
        self.env = env
        self.rng = rng

    def __call__(self, states, goals=None) -> list:
        return [self.env.random_action(self.rng) for _ in states]


def maze_next_cells(spec: MazeSpec) -> dict[tuple[int, int], tuple[int, int]]:
    """For every free cell, the neighbour one step closer to the goal cell (BFS from the goal)."""
    goal = tuple(spec.goal_cell)
    free = set(spec.free_cells())
    next_cell = {goal: goal}
    queue = deque([goal])
    while queue:
        row, col = queue.popleft()
        # neighbours in UP, DOWN, LEFT, RIGHT order
        for d_row, d_col in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            neighbour = (row + d_row, col + d_col)
            if neighbour in free and neighbour not in next_cell:
                next_cell[neighbour] = (row, col)
                queue.append(neighbour)
    return next_cell


class WaypointExpert:
    """Proportional-derivative controller through the cell centres of a shortest path.

    Outside the goal cell the target is the centre of the next cell towards the
    goal; inside it, the episode's goal point.
    """

    def __init__(self, spec: MazeSpec, gain: float = 2.0, damping: float = 2.0):
        self.spec = spec
        self.gain = gain
        self.damping = damping
        self.next_cell = maze_next_cells(spec)

    def target(self, state, goal) -> tuple[float, float]:
        cell = self.spec.cell_of(state[0], state[1])
        if cell == tuple(self.spec.goal_cell):
            return float(goal[0]), float(goal[1])
        return self.spec.cell_center(self.next_cell[cell])

    def __call__(self, states, goals) -> list[tuple[float, float]]:
        actions = []
        for state, goal in zip(states, goals):
            tx, ty = self.target(state, goal)
            x, y, vx, vy = state
            force = np.array([
                self.gain * (tx - x) - self.damping * vx,
                self.gain * (ty - y) - self.damping * vy,
            ])
            fx, fy = np.clip(force, -self.spec.force_bound, self.spec.force_bound)
            actions.append((float(fx), float(fy)))
        return actions


def make_expert(env):
    if env.discrete:
        return TabularExpert.for_spec(env.spec)
    return WaypointExpert(env.spec)
