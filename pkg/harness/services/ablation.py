"""Ablação de schedules: treina STO-RL uma vez por fixture da tarefa e compara o sucesso."""
from __future__ import annotations

import logging
from dataclasses import dataclass

from gridworlds.services.records import Dataset
from learner.services.iql import IQLHyper
from learner.services.network import NetworkSpec
from learner.services.state import STORL
from planner.services.fixtures import FIXTURES, load_fixture
from planner.services.parser import parse_response
from planner.services.schedule import Provenance, validate_schedule
from shaping.services.augment import augment_dataset
from shaping.services.potential import ShapingParams

from .experiment import prepare_learner, train_and_evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AblationRow:
    fixture: str
    schedule_digest: str
    K: int
    accepted: bool
    repaired_cells: int
    success_rate: float
    mean_steps: float
    success_mean_steps: float | None

    def as_dict(self) -> dict:
        return {
            "fixture": self.fixture,
            "schedule_digest": self.schedule_digest,
            "K": self.K,
            "accepted": self.accepted,
            "repaired_cells": self.repaired_cells,
            "success_rate": self.success_rate,
            "mean_steps": self.mean_steps,
            "success_mean_steps": self.success_mean_steps,
        }


def fixtures_for(task_id: str) -> list[str]:
    return [name for name, task in FIXTURES.items() if task == task_id]


def run_schedule_ablation(
    env,
    dataset: Dataset,
    hyper: IQLHyper,
    seed: int = 0,
    fixtures: list[str] | None = None,
    iterations: int | None = None,
    eval_episodes: int = 100,
    network: NetworkSpec | None = None,
) -> list[AblationRow]:
    """One STO-RL run per schedule on the same dataset and seed; rejected schedules still train on their repaired mapping."""
    params = ShapingParams(env.gamma, env.horizon)
    rows = []
    for name in fixtures or fixtures_for(env.task_id):
        parsed = parse_response(load_fixture(name), env.task_id, Provenance("fixture", name))
        report = validate_schedule(parsed, env.spec)
        if not report.accepted:
            logger.warning(
                f"Schedule {name} rejeitado, treina com o mapeamento reparado",
                extra={"fixture": name, "violations": list(report.endpoint_violations)},
            )
        schedule = report.schedule
        shaped = augment_dataset(dataset, schedule, params)
        learner = prepare_learner(STORL, env, shaped, seed, network)
        result = train_and_evaluate(
            learner,
            env,
            shaped,
            hyper,
            schedule=schedule,
            iterations=iterations,
            curve_episodes=0,
            eval_episodes=eval_episodes,
            eval_seed=seed,
        )
        rows.append(AblationRow(
            fixture=name,
            schedule_digest=schedule.digest,
            K=schedule.K,
            accepted=report.accepted,
            repaired_cells=len(report.uncovered) + len(report.in_walls),
            success_rate=result.report.success_rate,
            mean_steps=result.report.mean_steps,
            success_mean_steps=result.report.success_mean_steps,
        ))
    return rows
