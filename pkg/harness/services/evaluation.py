"""
Avaliação por rollouts: todos os episódios avançam em conjunto, um passo de
cada vez, para que a política seja chamada uma vez por passo com o lote dos
episódios ainda activos.

Steps are averaged over all episodes with failures counted at T; the mean over
successful episodes only is reported alongside.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import EmptyReportError

from .datasets import episode_rngs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    episodes: int
    successes: int
    mean_steps: float
    std_steps: float
    success_mean_steps: float | None = None
    success_std_steps: float | None = None

    @property
    def success_rate(self) -> float:
        return self.successes / self.episodes

    def as_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "mean_steps": self.mean_steps,
            "std_steps": self.std_steps,
            "success_mean_steps": self.success_mean_steps,
            "success_std_steps": self.success_std_steps,
        }


def summarize(steps, reached, horizon: int) -> EvalReport:
    steps = np.asarray(steps, dtype=float)
    reached = np.asarray(reached, dtype=bool)
    if steps.size == 0:
        raise EmptyReportError("Relatório sem episódios")
    counted = np.where(reached, steps, float(horizon))
    ok = steps[reached]
    return EvalReport(
        episodes=int(steps.size),
        successes=int(reached.sum()),
        mean_steps=float(counted.mean()),
        std_steps=float(counted.std()),
        success_mean_steps=float(ok.mean()) if ok.size else None,
        success_std_steps=float(ok.std()) if ok.size else None,
    )


def evaluate(policy, env, episodes: int = 100, seed: int = 0) -> EvalReport:
    if episodes < 1:
        raise EmptyReportError("Pedido de avaliação com zero episódios")

    starts = [env.reset(rng) for rng in episode_rngs(seed, episodes)]
    states = [s for s, _ in starts]
    goals = [g for _, g in starts]
    steps = np.full(episodes, env.horizon)
    reached = np.zeros(episodes, dtype=bool)
    active = list(range(episodes))

    for t in range(env.horizon):
        if not active:
            break
        actions = policy([states[i] for i in active], [goals[i] for i in active])
        still_active = []
        for i, action in zip(active, actions):
            states[i], _, done = env.step(states[i], action, goals[i])
            if done:
                reached[i] = True
                steps[i] = t + 1
            else:
                still_active.append(i)
        active = still_active

    report = summarize(steps, reached, env.horizon)
    logger.info(
        f"Avaliação {env.task_id}: sucesso {report.success_rate:.2f}, "
        f"passos {report.mean_steps:.1f} ± {report.std_steps:.1f} ({episodes} episódios)"
    )
    return report
