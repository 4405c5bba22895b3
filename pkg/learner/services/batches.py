"""Tabela de transições codificadas e amostragem de minibatches."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.exceptions import EmptyBatchError, ShapingError
from gridworlds.services.records import Dataset
from shaping.services.augment import ShapedDataset

from .encoding import Encoder


@dataclass(frozen=True)
class Batch:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray
    action_index: np.ndarray | None = None
    subgoals: np.ndarray | None = None

    def __len__(self) -> int:
        return self.states.shape[0]


@dataclass(frozen=True)
class TransitionTable:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray
    action_index: np.ndarray | None = None
    subgoals: np.ndarray | None = None

    def __len__(self) -> int:
        return self.states.shape[0]

    def take(self, indices) -> Batch:
        return Batch(
            states=self.states[indices],
            actions=self.actions[indices],
            rewards=self.rewards[indices],
            next_states=self.next_states[indices],
            terminals=self.terminals[indices],
            action_index=None if self.action_index is None else self.action_index[indices],
            subgoals=None if self.subgoals is None else self.subgoals[indices],
        )

    def sample(self, rng: np.random.Generator, batch_size: int) -> Batch:
        if len(self) == 0:
            raise EmptyBatchError("Dataset sem transições")
        return self.take(rng.integers(0, len(self), size=batch_size))


def build_table(dataset: Dataset | ShapedDataset, encoder: Encoder, shaped: bool = False) -> TransitionTable:
    """Flatten a dataset into encoded arrays.

    With a ShapedDataset the subgoal one-hots are always filled and `shaped`
    picks r′ over the base reward. Terminal = the base reward is 1 (goal
    reached); horizon cut-offs keep bootstrapping.
    """
    if isinstance(dataset, ShapedDataset):
        rows = [tr for traj in dataset.trajectories for tr in traj.transitions]
        base = [tr.base for tr in rows]
        rewards = [tr.reward if shaped else tr.base_reward for tr in rows]
        ks = [tr.k for tr in rows]
    else:
        if shaped:
            raise ShapingError("Recompensa moldada pedida para um dataset não aumentado")
        base = [tr for traj in dataset.trajectories for tr in traj.transitions]
        rewards = [tr.reward for tr in base]
        ks = None

    if not base:
        width = encoder.state_width
        return TransitionTable(
            states=np.zeros((0, width)),
            actions=np.zeros((0, encoder.action_width)),
            rewards=np.zeros(0),
            next_states=np.zeros((0, width)),
            terminals=np.zeros(0),
        )

    raw_actions = [tr.action for tr in base]
    subgoals = None
    if ks is not None:
        subgoals = Encoder.subgoals(ks, dataset.K)

    return TransitionTable(
        states=encoder.states([tr.state for tr in base]),
        actions=encoder.actions(raw_actions),
        rewards=np.asarray(rewards, dtype=float),
        next_states=encoder.states([tr.next_state for tr in base]),
        terminals=np.asarray([tr.reward == 1.0 for tr in base], dtype=float),
        action_index=np.asarray(raw_actions, dtype=int) if encoder.discrete else None,
        subgoals=subgoals,
    )
