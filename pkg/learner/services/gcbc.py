"""Goal-conditioned behavioural cloning: π(a | s ⊕ one-hot(k)) por máxima verosimilhança."""
from __future__ import annotations

import logging

import numpy as np

from core.exceptions import ConfigError, DivergenceError, EmptyBatchError

from .batches import Batch
from .iql import IQLHyper, policy_log_likelihood
from .network import adam_step, backward, forward
from .state import GCBC, LearnerState, policy_inputs

logger = logging.getLogger(__name__)


def gcbc_loss(learner: LearnerState, batch: Batch) -> tuple[float, np.ndarray, np.ndarray]:
    """(−mean log π(a|s,k), policy inputs, gradient w.r.t. the policy output)."""
    if batch.subgoals is None:
        raise ConfigError("GC-BC precisa de índices de sub-objectivo no batch")
    inputs = policy_inputs(learner, batch.states, batch.subgoals)
    out = forward(learner.policy, inputs)
    logp, dlogp = policy_log_likelihood(out, batch, learner.discrete)
    return float(-np.mean(logp)), inputs, -dlogp / len(batch)


def gcbc_update(learner: LearnerState, batch: Batch, hyper: IQLHyper) -> float:
    if learner.method != GCBC:
        raise ConfigError(f"gcbc_update chamado para o método {learner.method}")
    if len(batch) == 0:
        raise EmptyBatchError("Batch vazio")

    loss, inputs, grad_out = gcbc_loss(learner, batch)
    if not np.isfinite(loss):
        logger.error(f"Divergência GC-BC no passo {learner.step}")
        raise DivergenceError(f"Perda GC-BC não finita no passo {learner.step}")

    grads = backward(learner.policy, inputs, grad_out)
    adam_step(learner.policy, grads, learner.optimizers["policy"], hyper.learning_rate)
    learner.step += 1
    return loss
