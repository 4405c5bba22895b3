"""
Registo das quatro tarefas e interface comum de ambiente.

The environments are immutable: `reset` and `step` are pure given their inputs,
and the per-episode goal (noisy for the mazes) is owned by the caller.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from core.exceptions import UnknownTaskError

from .grid import Action, DiscreteState, GridSpec, grid_reset, grid_step
from .kinematic import KinematicState, MazeSpec, kinematic_step, maze_reset, sample_goal
from .maps import load_bundled_map

CLIFFWALKING = "cliffwalking"
FOURROOM = "fourroom"
UMAZE = "umaze"
MEDIUM = "medium"
TASK_IDS = (CLIFFWALKING, FOURROOM, UMAZE, MEDIUM)
GRID_TASKS = (CLIFFWALKING, FOURROOM)
MAZE_TASKS = (UMAZE, MEDIUM)


def cliffwalking_spec(gamma: float = 0.99, horizon: int = 100) -> GridSpec:
    return GridSpec(
        name=CLIFFWALKING,
        width=12,
        height=4,
        walls=frozenset(),
        cliff=frozenset((3, c) for c in range(1, 11)),
        start=DiscreteState(3, 0),
        goal=DiscreteState(3, 11),
        horizon=horizon,
        gamma=gamma,
    )


def fourroom_spec(gamma: float = 0.99, horizon: int = 100) -> GridSpec:
    matrix = load_bundled_map(FOURROOM)
    return GridSpec(
        name=FOURROOM,
        width=matrix.width,
        height=matrix.height,
        walls=matrix.walls,
        start=DiscreteState(*matrix.start),
        goal=DiscreteState(*matrix.goal),
        horizon=horizon,
        gamma=gamma,
    )


def umaze_spec(gamma: float = 0.996, horizon: int = 200) -> MazeSpec:
    return MazeSpec(name=UMAZE, cells=load_bundled_map(UMAZE), horizon=horizon, gamma=gamma)


def medium_spec(gamma: float = 0.999, horizon: int = 500) -> MazeSpec:
    return MazeSpec(name=MEDIUM, cells=load_bundled_map(MEDIUM), horizon=horizon, gamma=gamma)


_SPEC_BUILDERS = {
    CLIFFWALKING: cliffwalking_spec,
    FOURROOM: fourroom_spec,
    UMAZE: umaze_spec,
    MEDIUM: medium_spec,
}


def get_spec(task_id: str, **overrides) -> GridSpec | MazeSpec:
    try:
        builder = _SPEC_BUILDERS[task_id]
    except KeyError as exc:
        raise UnknownTaskError(f"Tarefa desconhecida: {task_id!r}") from exc
    return builder(**{k: v for k, v in overrides.items() if v is not None})


class StepResult(NamedTuple):
    state: Any
    reward: float
    done: bool


@dataclass(frozen=True)
class GridEnvironment:
    spec: GridSpec
    discrete: bool = field(default=True, init=False)
    n_actions: int = field(default=len(Action), init=False)

    @property
    def task_id(self) -> str:
        return self.spec.name

    @property
    def horizon(self) -> int:
        return self.spec.horizon

    @property
    def gamma(self) -> float:
        return self.spec.gamma

    def reset(self, rng: np.random.Generator) -> tuple[DiscreteState, DiscreteState]:
        return grid_reset(self.spec), self.spec.goal

    def step(self, state, action, goal=None) -> StepResult:
        return StepResult(*grid_step(self.spec, state, action))

    def random_action(self, rng: np.random.Generator) -> int:
        return int(rng.integers(len(Action)))

    def cell_of(self, state) -> tuple[int, int]:
        return int(state[0]), int(state[1])


@dataclass(frozen=True)
class MazeEnvironment:
    spec: MazeSpec
    discrete: bool = field(default=False, init=False)
    n_actions: int = field(default=2, init=False)

    @property
    def task_id(self) -> str:
        return self.spec.name

    @property
    def horizon(self) -> int:
        return self.spec.horizon

    @property
    def gamma(self) -> float:
        return self.spec.gamma

    def reset(self, rng: np.random.Generator) -> tuple[KinematicState, tuple[float, float]]:
        state = maze_reset(self.spec, rng)
        return state, sample_goal(self.spec, rng)

    def step(self, state, action, goal) -> StepResult:
        return StepResult(*kinematic_step(self.spec, state, action, goal))

    def random_action(self, rng: np.random.Generator) -> tuple[float, float]:
        fx, fy = rng.uniform(-self.spec.force_bound, self.spec.force_bound, size=2)
        return float(fx), float(fy)

    def cell_of(self, state) -> tuple[int, int]:
        return self.spec.cell_of(state[0], state[1])


Environment = GridEnvironment | MazeEnvironment


def make_environment(task_id: str, gamma: float | None = None, horizon: int | None = None) -> Environment:
    spec = get_spec(task_id, gamma=gamma, horizon=horizon)
    if isinstance(spec, GridSpec):
        return GridEnvironment(spec)
    return MazeEnvironment(spec)


def reset(spec: GridSpec | MazeSpec, seed: int | None = None):
    """Initial state for one episode: fixed start on grids, noisy start cell centre on mazes."""
    if isinstance(spec, GridSpec):
        return grid_reset(spec)
    return maze_reset(spec, np.random.default_rng(seed))
