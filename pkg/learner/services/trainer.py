"""
Ciclo de treino offline: amostra minibatches da tabela, aplica o update do
método (IQL para storl/iql, BC para gcbc) e chama o avaliador a cada E passos.

Minibatches are drawn from the learner's own RNG, so a run resumed from a
checkpoint continues the exact same sequence.
"""
from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import asdict, dataclass, field, is_dataclass
from typing import Any

from core.exceptions import ConfigError

from .batches import TransitionTable
from .gcbc import gcbc_update
from .iql import IQLHyper, IQLLosses, iql_update
from .state import GCBC, LearnerState

logger = logging.getLogger(__name__)

DEFAULT_EVAL_EVERY = 10

Evaluator = Callable[[int, LearnerState], Any]


@dataclass
class TrainingRun:
    learner: LearnerState
    evaluations: list = field(default_factory=list)
    last_losses: IQLLosses | float | None = None

    @property
    def iterations(self) -> int:
        return self.learner.step


def train_step(learner: LearnerState, table: TransitionTable, hyper: IQLHyper, gamma: float):
    batch = table.sample(learner.rng, hyper.batch_size)
    if learner.method == GCBC:
        return gcbc_update(learner, batch, hyper)
    return iql_update(learner, batch, hyper, gamma)


def train_learner(
    learner: LearnerState,
    table: TransitionTable,
    hyper: IQLHyper,
    gamma: float,
    iterations: int | None = None,
    eval_every: int = DEFAULT_EVAL_EVERY,
    evaluator: Evaluator | None = None,
    log_every: int = 100,
) -> TrainingRun:
    """Train until `learner.step` reaches `iterations` (default: hyper.iterations).

    The evaluator runs after every `eval_every`-th step and after the final one;
    its return values are collected in order.
    """
    target = hyper.iterations if iterations is None else iterations
    if eval_every < 1 or log_every < 1:
        raise ConfigError("eval_every e log_every devem ser >= 1")
    if learner.step > target:
        raise ConfigError(f"O learner já está no passo {learner.step}, além do alvo {target}")

    run = TrainingRun(learner=learner)
    if learner.step == target:
        return run

    logger.info(f"Treino {learner.method}: passos {learner.step} -> {target}")
    while learner.step < target:
        run.last_losses = train_step(learner, table, hyper, gamma)
        step = learner.step
        if step % log_every == 0:
            losses = asdict(run.last_losses) if is_dataclass(run.last_losses) else run.last_losses
            logger.info(f"Passo {step}", extra={"step": step, "losses": losses})
        if evaluator is not None and (step % eval_every == 0 or step == target):
            run.evaluations.append(evaluator(step, learner))
    return run
