"""
Dinâmica determinística das grelhas (CliffWalking, FourRoom).

Rules:
- Moving into a wall or off the grid leaves the agent where it is.
- Entering a cliff cell sends the agent back to the start with reward 0; the
  episode clock keeps running (the caller owns t).
- Reaching the goal gives reward 1 and ends the episode; every other step gives 0.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple

from core.exceptions import InvalidActionError, InvalidStateError


class Action(IntEnum):
    # Order doubles as the deterministic tie-break everywhere.
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


MOVES: dict[Action, tuple[int, int]] = {
    Action.UP: (-1, 0),
    Action.DOWN: (1, 0),
    Action.LEFT: (0, -1),
    Action.RIGHT: (0, 1),
}

ARROWS: dict[Action, str] = {
    Action.UP: "^",
    Action.DOWN: "v",
    Action.LEFT: "<",
    Action.RIGHT: ">",
}


class DiscreteState(NamedTuple):
    row: int
    col: int


class GridStepResult(NamedTuple):
    state: DiscreteState
    reward: float
    done: bool


@dataclass(frozen=True)
class GridSpec:
    name: str
    width: int
    height: int
    walls: frozenset[tuple[int, int]]
    start: DiscreteState
    goal: DiscreteState
    horizon: int
    gamma: float
    cliff: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma deve estar em (0,1): {self.gamma}")
        if self.horizon < 1:
            raise ValueError("horizon deve ser positivo")
        for label, cell in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(cell):
                raise ValueError(f"{label} fora da grelha: {cell}")
            if tuple(cell) in self.walls or tuple(cell) in self.cliff:
                raise ValueError(f"{label} não pode estar numa parede ou no precipício: {cell}")

    def in_bounds(self, cell) -> bool:
        row, col = cell
        return 0 <= row < self.height and 0 <= col < self.width

    def is_wall(self, cell) -> bool:
        return tuple(cell) in self.walls

    def free_cells(self) -> list[DiscreteState]:
        """Every non-wall cell in row-major order (cliff cells included)."""
        return [
            DiscreteState(r, c)
            for r in range(self.height)
            for c in range(self.width)
            if (r, c) not in self.walls
        ]

    def flat_index(self, cell) -> int:
        row, col = cell
        return row * self.width + col

    @property
    def n_cells(self) -> int:
        return self.width * self.height


def _check_state(spec: GridSpec, s) -> DiscreteState:
    if not spec.in_bounds(s):
        raise InvalidStateError(f"Estado fora da grelha {spec.name}: {tuple(s)}")
    if spec.is_wall(s):
        raise InvalidStateError(f"Estado dentro de uma parede em {spec.name}: {tuple(s)}")
    return DiscreteState(*s)


def _check_action(a) -> Action:
    try:
        return Action(int(a))
    except (TypeError, ValueError) as exc:
        raise InvalidActionError(f"Acção inválida: {a!r}") from exc


def grid_step(spec: GridSpec, s, a) -> GridStepResult:
    state = _check_state(spec, s)
    action = _check_action(a)
    d_row, d_col = MOVES[action]
    candidate = DiscreteState(state.row + d_row, state.col + d_col)

    if not spec.in_bounds(candidate) or spec.is_wall(candidate):
        candidate = state

    if tuple(candidate) in spec.cliff:
        return GridStepResult(spec.start, 0.0, False)

    if candidate == spec.goal:
        return GridStepResult(candidate, 1.0, True)

    return GridStepResult(candidate, 0.0, False)


def grid_reset(spec: GridSpec) -> DiscreteState:
    return spec.start


def bfs_distances(spec: GridSpec, source=None) -> dict[DiscreteState, int]:
    """Shortest step counts from `source` (default: start) under grid_step dynamics."""
    origin = DiscreteState(*(source if source is not None else spec.start))
    distances = {origin: 0}
    queue = deque([origin])
    while queue:
        cell = queue.popleft()
        if cell == spec.goal:
            continue
        for action in Action:
            nxt = grid_step(spec, cell, action).state
            if nxt not in distances:
                distances[nxt] = distances[cell] + 1
                queue.append(nxt)
    return distances


def bfs_shortest_path(spec: GridSpec, source=None, target=None) -> list[DiscreteState]:
    """Cell sequence of one shortest path, expanding actions in tie-break order."""
    origin = DiscreteState(*(source if source is not None else spec.start))
    destination = DiscreteState(*(target if target is not None else spec.goal))
    parents: dict[DiscreteState, DiscreteState | None] = {origin: None}
    queue = deque([origin])
    while queue:
        cell = queue.popleft()
        if cell == destination:
            break
        for action in Action:
            nxt = grid_step(spec, cell, action).state
            if nxt not in parents:
                parents[nxt] = cell
                queue.append(nxt)

    if destination not in parents:
        return []
    path = [destination]
    while parents[path[-1]] is not None:
        path.append(parents[path[-1]])
    return path[::-1]
