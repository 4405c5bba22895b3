"""
Point-mass maze with double-integrator dynamics and axis-aligned unit walls.

Coordinates: x runs along columns and y along rows, so the cell (row, col)
covers [col, col+1) x [row, row+1) and its centre is (col + 0.5, row + 0.5).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from core.exceptions import InvalidActionError, InvalidStateError

from .maps import MapMatrix

# Offset used when clamping onto a wall face so the point stays in the free cell.
_FACE_EPS = 1e-9


class KinematicState(NamedTuple):
    x: float
    y: float
    vx: float
    vy: float


class KinematicStepResult(NamedTuple):
    state: KinematicState
    reward: float
    done: bool


@dataclass(frozen=True)
class MazeSpec:
    name: str
    cells: MapMatrix
    horizon: int
    gamma: float
    noise_std: tuple[float, float] = (0.25, 0.25)
    goal_radius: float = 0.5
    force_bound: float = 1.0
    dt: float = 0.1
    v_max: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma deve estar em (0,1): {self.gamma}")

    @property
    def width(self) -> int:
        return self.cells.width

    @property
    def height(self) -> int:
        return self.cells.height

    @property
    def walls(self) -> frozenset[tuple[int, int]]:
        return self.cells.walls

    @property
    def start_cell(self) -> tuple[int, int]:
        return self.cells.start

    @property
    def goal_cell(self) -> tuple[int, int]:
        return self.cells.goal

    @staticmethod
    def cell_center(cell) -> tuple[float, float]:
        row, col = cell
        return col + 0.5, row + 0.5

    @staticmethod
    def cell_of(x: float, y: float) -> tuple[int, int]:
        return math.floor(y), math.floor(x)

    def is_free_point(self, x: float, y: float) -> bool:
        row, col = self.cell_of(x, y)
        if not (0 <= row < self.height and 0 <= col < self.width):
            return False
        return (row, col) not in self.walls

    def free_cells(self) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r in range(self.height)
            for c in range(self.width)
            if (r, c) not in self.walls
        ]


def _move_axis(spec: MazeSpec, pos: float, vel: float, other: float, axis: str) -> tuple[float, float]:
    step = vel * spec.dt
    target = pos + step
    probe = (target, other) if axis == "x" else (other, target)
    if spec.is_free_point(*probe):
        return target, vel

    # Blocked: clamp to the face of the wall cell entered and kill the normal velocity.
    wall_index = math.floor(target)
    if step > 0:
        return wall_index - _FACE_EPS, 0.0
    return float(wall_index + 1), 0.0


def kinematic_step(spec: MazeSpec, s, force, goal, dt: float | None = None) -> KinematicStepResult:
    if dt is not None and dt != spec.dt:
        spec = replace(spec, dt=dt)

    force_arr = np.asarray(force, dtype=float).reshape(-1)
    if force_arr.shape != (2,) or not np.all(np.isfinite(force_arr)):
        raise InvalidActionError(f"Força inválida: {force!r}")
    fx, fy = np.clip(force_arr, -spec.force_bound, spec.force_bound)

    x, y, vx, vy = (float(v) for v in s)
    if not spec.is_free_point(x, y):
        raise InvalidStateError(f"Posição fora do labirinto ou numa parede: ({x}, {y})")

    vx = float(np.clip(vx + fx * spec.dt, -spec.v_max, spec.v_max))
    vy = float(np.clip(vy + fy * spec.dt, -spec.v_max, spec.v_max))

    x, vx = _move_axis(spec, x, vx, y, "x")
    y, vy = _move_axis(spec, y, vy, x, "y")

    state = KinematicState(x, y, vx, vy)
    gx, gy = goal
    if math.hypot(x - gx, y - gy) < spec.goal_radius:
        return KinematicStepResult(state, 1.0, True)
    return KinematicStepResult(state, 0.0, False)


def _noisy_point(spec: MazeSpec, cell, rng: np.random.Generator) -> tuple[float, float]:
    cx, cy = spec.cell_center(cell)
    sx, sy = spec.noise_std
    while True:
        x = cx + (rng.normal(0.0, sx) if sx > 0 else 0.0)
        y = cy + (rng.normal(0.0, sy) if sy > 0 else 0.0)
        if spec.is_free_point(x, y):
            return x, y


def maze_reset(spec: MazeSpec, rng: np.random.Generator) -> KinematicState:
    x, y = _noisy_point(spec, spec.start_cell, rng)
    return KinematicState(x, y, 0.0, 0.0)


def sample_goal(spec: MazeSpec, rng: np.random.Generator) -> tuple[float, float]:
    return _noisy_point(spec, spec.goal_cell, rng)
