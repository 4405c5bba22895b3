"""Registos de experiência offline: transições e trajectórias."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Transition:
    state: tuple
    action: Any
    next_state: tuple
    reward: float
    t: int
    done: bool


@dataclass(frozen=True)
class Trajectory:
    transitions: tuple[Transition, ...]
    success: bool
    # per-episode goal point on the mazes; grids use the fixed goal cell
    goal: tuple | None = None

    def __len__(self) -> int:
        return len(self.transitions)

    @property
    def states(self) -> list[tuple]:
        """s_0 .. s_H (H + 1 states for H transitions)."""
        if not self.transitions:
            return []
        return [tr.state for tr in self.transitions] + [self.transitions[-1].next_state]

    @property
    def actions(self) -> list:
        return [tr.action for tr in self.transitions]

    def is_consistent(self) -> bool:
        return all(tr.t == i for i, tr in enumerate(self.transitions))


def _plain(value):
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, float):
        return value
    if hasattr(value, "item"):
        return value.item()
    return value


@dataclass(frozen=True)
class Dataset:
    """Offline dataset D: ordered trajectories plus the generation metadata."""

    env_id: str
    trajectories: tuple[Trajectory, ...]
    seed: int
    config_digest: str = ""

    def __len__(self) -> int:
        return len(self.trajectories)

    @property
    def n_transitions(self) -> int:
        return sum(len(traj) for traj in self.trajectories)

    @property
    def digest(self) -> str:
        hasher = hashlib.sha256(self.env_id.encode("utf-8"))
        for traj in self.trajectories:
            for tr in traj.transitions:
                row = [_plain(tr.state), _plain(tr.action), _plain(tr.next_state), tr.reward, tr.t, tr.done]
                hasher.update(json.dumps(row, separators=(",", ":")).encode("utf-8"))
            if traj.goal is not None:
                hasher.update(json.dumps(_plain(traj.goal)).encode("utf-8"))
            hasher.update(b"|")
        return hasher.hexdigest()[:16]
