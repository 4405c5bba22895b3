"""
Aumento do dataset offline: cada transição recebe k_t = h(s_t), k_{t+1} = h(s_{t+1})
e a recompensa moldada. O dataset de origem não é alterado.

The potential depends on the step index, so augmentation works trajectory by
trajectory and uses each transition's own t.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from core.exceptions import InvalidStateError, UnmappableStateError
from gridworlds.services.records import Dataset, Trajectory, Transition
from planner.services.schedule import SubgoalSchedule, progress_index

from .potential import ShapingParams, shaped_reward

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShapedTransition:
    base: Transition
    k: int
    k_next: int
    reward: float

    @property
    def base_reward(self) -> float:
        return self.base.reward


@dataclass(frozen=True)
class ShapedTrajectory:
    transitions: tuple[ShapedTransition, ...]
    success: bool
    goal: tuple | None = None

    def __len__(self) -> int:
        return len(self.transitions)

    @property
    def progress(self) -> list[int]:
        """k_0 .. k_H."""
        if not self.transitions:
            return []
        return [tr.k for tr in self.transitions] + [self.transitions[-1].k_next]

    def as_base(self) -> Trajectory:
        return Trajectory(tuple(tr.base for tr in self.transitions), self.success, self.goal)


@dataclass(frozen=True)
class ShapedDataset:
    env_id: str
    trajectories: tuple[ShapedTrajectory, ...]
    params: ShapingParams
    K: int
    source_digest: str
    seed: int = 0

    def __len__(self) -> int:
        return len(self.trajectories)

    @property
    def n_transitions(self) -> int:
        return sum(len(traj) for traj in self.trajectories)

    def as_base(self) -> Dataset:
        return Dataset(
            env_id=self.env_id,
            trajectories=tuple(traj.as_base() for traj in self.trajectories),
            seed=self.seed,
        )


def _lookup(schedule: SubgoalSchedule, state, trajectory_id: int, index: int) -> int:
    try:
        return progress_index(schedule, state)
    except InvalidStateError as exc:
        raise UnmappableStateError(trajectory_id, index, tuple(state)) from exc


def augment_trajectory(traj: Trajectory, schedule: SubgoalSchedule, params: ShapingParams, trajectory_id: int = 0) -> ShapedTrajectory:
    shaped = []
    for index, tr in enumerate(traj.transitions):
        k = _lookup(schedule, tr.state, trajectory_id, index)
        k_next = _lookup(schedule, tr.next_state, trajectory_id, index + 1)
        reward = float(shaped_reward(tr.reward, tr.t, k, k_next, params))
        shaped.append(ShapedTransition(base=tr, k=k, k_next=k_next, reward=reward))
    return ShapedTrajectory(tuple(shaped), traj.success, traj.goal)


def augment_dataset(dataset: Dataset, schedule: SubgoalSchedule, params: ShapingParams) -> ShapedDataset:
    params.warn_if_boundary()
    if params.schedule_digest and params.schedule_digest != schedule.digest:
        logger.warning(
            f"ShapingParams referem o schedule {params.schedule_digest}, a usar {schedule.digest}"
        )
    trajectories = tuple(
        augment_trajectory(traj, schedule, params, trajectory_id=i)
        for i, traj in enumerate(dataset.trajectories)
    )
    logger.info(
        f"Dataset {dataset.env_id} aumentado: {len(trajectories)} trajectórias, K={schedule.K}"
    )
    return ShapedDataset(
        env_id=dataset.env_id,
        trajectories=trajectories,
        params=ShapingParams(params.gamma, params.horizon, schedule.digest),
        K=schedule.K,
        source_digest=dataset.digest,
        seed=dataset.seed,
    )
