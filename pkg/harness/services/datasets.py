"""
Geração de datasets offline por mistura expert/aleatório, estatísticas e replay.

Each episode gets its own generator spawned from SeedSequence(seed), so the
dataset depends only on (seed, config) and episodes can be produced in any
order before being collected by episode index.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError
from gridworlds.services.records import Dataset, Trajectory, Transition

logger = logging.getLogger(__name__)


def _plain_state(state) -> tuple:
    return tuple(v if isinstance(v, int) else float(v) for v in state)


def _plain_action(action):
    if isinstance(action, (tuple, list, np.ndarray)):
        return tuple(float(v) for v in action)
    return int(action)


def episode_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(n)]


def run_episode(env, expert, expert_prob: float, rng: np.random.Generator, random_policy=None) -> Trajectory:
    """One behaviour episode: expert action with probability p, uniform random otherwise."""
    state, goal = env.reset(rng)
    transitions = []
    success = False
    for t in range(env.horizon):
        if rng.random() < expert_prob:
            action = expert([state], [goal])[0]
        elif random_policy is not None:
            action = random_policy([state], [goal])[0]
        else:
            action = env.random_action(rng)
        next_state, reward, done = env.step(state, action, goal)
        last = done or t == env.horizon - 1
        transitions.append(Transition(
            state=_plain_state(state),
            action=_plain_action(action),
            next_state=_plain_state(next_state),
            reward=float(reward),
            t=t,
            done=bool(last),
        ))
        state = next_state
        if done:
            success = True
            break
    goal_record = None if env.discrete else tuple(float(v) for v in goal)
    return Trajectory(tuple(transitions), success, goal_record)


def generate_dataset(
    env,
    expert,
    random_policy=None,
    expert_prob: float = 0.5,
    n_trajectories: int = 1000,
    seed: int = 0,
    config_digest: str = "",
) -> Dataset:
    if not 0.0 <= expert_prob <= 1.0:
        raise ConfigError(f"expert_prob deve estar em [0, 1]: {expert_prob}")
    rngs = episode_rngs(seed, n_trajectories)
    trajectories = tuple(run_episode(env, expert, expert_prob, rng, random_policy) for rng in rngs)
    dataset = Dataset(env_id=env.task_id, trajectories=trajectories, seed=seed, config_digest=config_digest)
    stats = dataset_stats(dataset, env.horizon) if trajectories else None
    logger.info(f"Dataset {env.task_id} gerado: N={n_trajectories}, p={expert_prob}, seed={seed}, {stats}")
    return dataset


@dataclass(frozen=True)
class DatasetStats:
    trajectories: int
    transitions: int
    success_rate: float
    mean_length: float
    std_length: float

    def as_dict(self) -> dict:
        return {
            "trajectories": self.trajectories,
            "transitions": self.transitions,
            "success_rate": self.success_rate,
            "mean_length": self.mean_length,
            "std_length": self.std_length,
        }


def dataset_stats(dataset: Dataset, horizon: int | None = None) -> DatasetStats:
    """Success rate and mean ± std length over all trajectories.

    With `horizon` given, failed trajectories count as `horizon` steps.
    """
    lengths = np.array([
        len(traj) if traj.success or horizon is None else horizon
        for traj in dataset.trajectories
    ], dtype=float)
    successes = sum(traj.success for traj in dataset.trajectories)
    n = len(dataset.trajectories)
    return DatasetStats(
        trajectories=n,
        transitions=dataset.n_transitions,
        success_rate=successes / n if n else 0.0,
        mean_length=float(lengths.mean()) if n else 0.0,
        std_length=float(lengths.std()) if n else 0.0,
    )


def replay_trajectory(env, trajectory: Trajectory) -> bool:
    """Re-step the env with the stored actions; True iff states, rewards and flags all match."""
    goal = trajectory.goal if trajectory.goal is not None else getattr(env.spec, "goal", None)
    for i, tr in enumerate(trajectory.transitions):
        if i > 0 and tr.state != trajectory.transitions[i - 1].next_state:
            return False
        next_state, reward, done = env.step(tr.state, tr.action, goal)
        if _plain_state(next_state) != tr.next_state or float(reward) != tr.reward:
            return False
        if done and not tr.done:
            return False
    return True
