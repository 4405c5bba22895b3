"""
Treino com avaliação periódica e avaliação final de um método numa tarefa.

Shared by the train command and the schedule ablation, so both run exactly
the same loop.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from core.exceptions import ConfigError
from gridworlds.services.records import Dataset
from learner.services.batches import build_table
from learner.services.encoding import Encoder
from learner.services.iql import IQLHyper
from learner.services.network import NetworkSpec
from learner.services.state import GCBC, GREEDY, STORL, LearnedPolicy, LearnerState, init_learner
from learner.services.trainer import DEFAULT_EVAL_EVERY, TrainingRun, train_learner
from planner.services.schedule import SubgoalSchedule
from shaping.services.augment import ShapedDataset

from .curves import CurvePoint
from .evaluation import EvalReport, evaluate

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    run: TrainingRun
    curve: list[CurvePoint]
    report: EvalReport

    @property
    def learner(self) -> LearnerState:
        return self.run.learner


def learned_policy(learner: LearnerState, env, schedule: SubgoalSchedule | None = None) -> LearnedPolicy:
    return LearnedPolicy(learner, Encoder(env.spec), schedule if learner.method == GCBC else None, mode=GREEDY)


def prepare_learner(
    method: str,
    env,
    data: Dataset | ShapedDataset,
    seed: int,
    network: NetworkSpec | None = None,
) -> LearnerState:
    if method in (STORL, GCBC) and not isinstance(data, ShapedDataset):
        raise ConfigError(f"O método {method} precisa do dataset aumentado")
    n_subgoals = data.K if method == GCBC else 0
    return init_learner(method, Encoder(env.spec), seed, network, n_subgoals=n_subgoals)


def train_and_evaluate(
    learner: LearnerState,
    env,
    data: Dataset | ShapedDataset,
    hyper: IQLHyper,
    schedule: SubgoalSchedule | None = None,
    iterations: int | None = None,
    eval_every: int = DEFAULT_EVAL_EVERY,
    curve_episodes: int = 10,
    eval_episodes: int = 100,
    eval_seed: int = 0,
    log_every: int = 100,
) -> ExperimentResult:
    """STO-RL trains on r′; IQL and GC-BC on the base reward. The curve starts at step 0 for fresh learners."""
    table = build_table(data, Encoder(env.spec), shaped=learner.method == STORL)
    policy = learned_policy(learner, env, schedule)

    def evaluator(step: int, _learner: LearnerState) -> CurvePoint:
        report = evaluate(policy, env, episodes=curve_episodes, seed=eval_seed)
        return CurvePoint(step, report.success_rate, report.mean_steps)

    curve = [evaluator(0, learner)] if learner.step == 0 and curve_episodes > 0 else []
    run = train_learner(
        learner,
        table,
        hyper,
        gamma=env.gamma,
        iterations=iterations,
        eval_every=eval_every,
        evaluator=evaluator if curve_episodes > 0 else None,
        log_every=log_every,
    )
    curve.extend(run.evaluations)
    report = evaluate(policy, env, episodes=eval_episodes, seed=eval_seed)
    logger.info(
        f"{learner.method} em {env.task_id}: passo {learner.step}, sucesso {report.success_rate:.2f}"
    )
    return ExperimentResult(run=run, curve=curve, report=report)
