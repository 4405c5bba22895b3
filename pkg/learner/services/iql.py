"""
Implicit Q-Learning com redes numpy.

One iteration is one minibatch step on all three losses:
- value: expectile regression of V(s) towards min(Q1', Q2')(s, a)
- twin Q: TD regression towards r + γ·(1 − terminal)·V(s′)
- policy: advantage-weighted log-likelihood, weight exp(β·(min Q′ − V)) clipped
Losses are computed with the parameters from before the step. Target Qs are
blended after the step.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError, DivergenceError, EmptyBatchError

from .batches import Batch
from .network import adam_step, backward, blend, forward
from .state import LearnerState, log_softmax

logger = logging.getLogger(__name__)

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class IQLHyper:
    expectile: float = 0.9
    beta: float = 3.0
    learning_rate: float = 3e-4
    batch_size: int = 256
    target_rate: float = 0.005
    iterations: int = 1000
    max_weight: float = 100.0

    def __post_init__(self):
        if not 0.5 < self.expectile < 1.0:
            raise ConfigError(f"iql.expectile deve estar em (0.5, 1): {self.expectile}")
        for name in ("beta", "learning_rate", "target_rate", "max_weight"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"iql.{name} deve ser positivo")
        if self.target_rate > 1:
            raise ConfigError("iql.target_rate deve estar em (0, 1]")
        if self.batch_size < 1 or self.iterations < 0:
            raise ConfigError("iql.batch_size >= 1 e iql.iterations >= 0")

    def as_dict(self) -> dict:
        return {
            "expectile": self.expectile,
            "beta": self.beta,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "target_rate": self.target_rate,
            "iterations": self.iterations,
            "max_weight": self.max_weight,
        }


@dataclass(frozen=True)
class IQLLosses:
    value: float
    q: float
    policy: float

    def is_finite(self) -> bool:
        return bool(np.isfinite([self.value, self.q, self.policy]).all())


def expectile_loss(u: np.ndarray, expectile: float) -> tuple[float, np.ndarray]:
    """mean(|τ − 1{u<0}|·u²) and its gradient with respect to u."""
    u = np.asarray(u, dtype=float)
    weight = np.where(u < 0, 1.0 - expectile, expectile)
    return float(np.mean(weight * u * u)), 2.0 * weight * u / u.size


def policy_log_likelihood(out: np.ndarray, batch: Batch, discrete: bool) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample log π(a|s) and d log π / d out."""
    if discrete:
        logp_all = log_softmax(out)
        rows = np.arange(out.shape[0])
        logp = logp_all[rows, batch.action_index]
        grad = -np.exp(logp_all)
        grad[rows, batch.action_index] += 1.0
        return logp, grad
    diff = batch.actions - out
    logp = -0.5 * np.sum(diff * diff, axis=1) - 0.5 * out.shape[1] * _LOG_2PI
    return logp, diff


def advantage_weights(learner: LearnerState, batch: Batch, hyper: IQLHyper) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(min target Q, V, clipped AWR weights) on the batch."""
    sa = np.concatenate([batch.states, batch.actions], axis=1)
    q_min = np.minimum(
        forward(learner.networks["q1_target"], sa),
        forward(learner.networks["q2_target"], sa),
    )[:, 0]
    v = forward(learner.networks["value"], batch.states)[:, 0]
    # exp(min(x, log w_max)) == min(exp(x), w_max) without overflowing
    weights = np.exp(np.minimum(hyper.beta * (q_min - v), np.log(hyper.max_weight)))
    return q_min, v, weights


def iql_update(learner: LearnerState, batch: Batch, hyper: IQLHyper, gamma: float) -> IQLLosses:
    n = len(batch)
    if n == 0:
        raise EmptyBatchError("Batch vazio")

    nets = learner.networks
    sa = np.concatenate([batch.states, batch.actions], axis=1)
    q_min, v, weights = advantage_weights(learner, batch, hyper)

    value_loss, du = expectile_loss(q_min - v, hyper.expectile)
    value_grads = backward(nets["value"], batch.states, -du[:, None])

    v_next = forward(nets["value"], batch.next_states)[:, 0]
    target = batch.rewards + gamma * (1.0 - batch.terminals) * v_next
    q_losses, q_grads = [], {}
    for name in ("q1", "q2"):
        diff = forward(nets[name], sa)[:, 0] - target
        q_losses.append(float(np.mean(diff * diff)))
        q_grads[name] = backward(nets[name], sa, (2.0 * diff / n)[:, None])

    out = forward(nets["policy"], batch.states)
    logp, dlogp = policy_log_likelihood(out, batch, learner.discrete)
    policy_loss = float(-np.mean(weights * logp))
    policy_grads = backward(nets["policy"], batch.states, -(weights / n)[:, None] * dlogp)

    losses = IQLLosses(value=value_loss, q=float(np.mean(q_losses)), policy=policy_loss)
    if not losses.is_finite():
        logger.error(f"Divergência no passo {learner.step}: {losses}")
        raise DivergenceError(f"Perda não finita no passo {learner.step}: {losses}")

    adam_step(nets["value"], value_grads, learner.optimizers["value"], hyper.learning_rate)
    for name in ("q1", "q2"):
        adam_step(nets[name], q_grads[name], learner.optimizers[name], hyper.learning_rate)
        blend(nets[f"{name}_target"], nets[name], hyper.target_rate)
    adam_step(nets["policy"], policy_grads, learner.optimizers["policy"], hyper.learning_rate)

    learner.step += 1
    return losses
