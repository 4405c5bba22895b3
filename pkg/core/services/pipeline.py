"""
Orquestração da pipeline: plan → gen-data → augment → train → eval → verify,
mais stats, value-map e ablate.

Each cmd_* takes a RunConfig, reads its inputs from the configured paths, writes
its outputs and returns a summary dict. Nothing here prints or exits; the
management command owns that.
"""
from __future__ import annotations

import logging

from django.db import DatabaseError

from core.config import RunConfig
from core.exceptions import ConfigError, ScheduleParseError, ScheduleRejectedError
from gridworlds.services.tasks import GRID_TASKS, get_spec, make_environment
from harness.services.ablation import run_schedule_ablation
from harness.services.curves import SMOOTHING_WINDOW, iterations_to_convergence, smooth_curve
from harness.services.datasets import dataset_stats, generate_dataset, replay_trajectory
from harness.services.evaluation import evaluate
from harness.services.experiment import learned_policy, prepare_learner, train_and_evaluate
from harness.services.experts import make_expert
from harness.services.io import (
    curve_csv,
    read_curve,
    read_dataset,
    read_schedule,
    read_shaped,
    records_csv,
    report_csv,
    write_csv,
    write_dataset,
    write_json,
    write_schedule,
    write_shaped,
    write_text,
)
from harness.services.value_map import export_value_map
from learner.services.checkpoint import load_checkpoint, save_checkpoint
from learner.services.state import GCBC, IQL
from planner.services.client import fetch_plan
from planner.services.fixtures import default_fixture_for, load_fixture
from planner.services.parser import parse_response
from planner.services.prompts import build_prompt
from planner.services.schedule import SubgoalSchedule, render_schedule, validate_schedule
from shaping.services.augment import augment_dataset
from shaping.services.oracles import (
    TOLERANCE,
    OracleResult,
    ProgressTrace,
    check_successful,
    run_oracle_suite,
    telescoping_residual,
)

logger = logging.getLogger(__name__)


def cmd_plan(config: RunConfig, **client_kwargs) -> dict:
    """Prompt → completion (live or fixture) → parse → validate/repair → schedule file."""
    request = build_prompt(config.task)
    response = fetch_plan(request, config.planner.endpoint(), **client_kwargs)
    if response.parse_status != "ok":
        raise ScheduleParseError(f"Resposta do planner não interpretável: {response.error}")

    schedule = SubgoalSchedule.from_subgoals(config.task, response.subtasks, response.provenance)
    report = validate_schedule(schedule, get_spec(config.task), strict=config.planner.strict)
    if not report.accepted:
        issues = "; ".join(report.endpoint_violations) or "duplicados em modo estrito"
        raise ScheduleRejectedError(f"Schedule rejeitado para {config.task}: {issues}")

    path = write_schedule(config.schedule_path(), report.schedule)
    write_text(path.with_suffix(".txt"), render_schedule(report.schedule))
    return {
        "schedule": str(path),
        "digest": report.schedule.digest,
        "K": report.schedule.K,
        "planner": response.provenance.kind,
        "source": response.provenance.source,
        "repairs": len(report.notes),
    }


def cmd_gen_data(config: RunConfig) -> dict:
    env = config.environment()
    dataset = generate_dataset(
        env,
        make_expert(env),
        expert_prob=config.dataset.expert_prob,
        n_trajectories=config.dataset.n_trajectories,
        seed=config.dataset.seed,
        config_digest=config.dataset_digest,
    )
    path = write_dataset(config.dataset_path(), dataset)
    return {"dataset": str(path), "digest": dataset.digest, **dataset_stats(dataset).as_dict()}


def _schedule_for(config: RunConfig) -> SubgoalSchedule:
    schedule = read_schedule(config.schedule_path())
    if schedule.task_id != config.task:
        raise ConfigError(f"O schedule em {config.schedule_path()} é de {schedule.task_id}, não de {config.task}")
    return schedule


def cmd_augment(config: RunConfig) -> dict:
    schedule = _schedule_for(config)
    dataset = read_dataset(config.dataset_path())
    shaped = augment_dataset(dataset, schedule, config.shaping)
    path = write_shaped(config.shaped_path(), shaped)
    return {
        "shaped": str(path),
        "K": shaped.K,
        "schedule_digest": schedule.digest,
        "source_digest": shaped.source_digest,
        "transitions": shaped.n_transitions,
    }


def _training_data(config: RunConfig):
    if config.method == IQL:
        return read_dataset(config.dataset_path())
    return read_shaped(config.shaped_path())


def cmd_train(config: RunConfig) -> dict:
    env = config.environment()
    data = _training_data(config)
    schedule = _schedule_for(config) if config.method == GCBC else None

    previous = []
    checkpoint_path = config.checkpoint_path()
    if config.train.resume and checkpoint_path.exists():
        checkpoint = load_checkpoint(checkpoint_path)
        learner = checkpoint.learner
        if learner.method != config.method:
            raise ConfigError(f"Checkpoint é de {learner.method}, configuração pede {config.method}")
        if config.curve_path().exists():
            previous = [p for p in read_curve(config.curve_path()) if p.iteration <= learner.step]
        logger.info(f"A retomar {config.method} a partir do passo {learner.step}")
    else:
        learner = prepare_learner(config.method, env, data, config.seed, config.network)

    result = train_and_evaluate(
        learner,
        env,
        data,
        config.iql,
        schedule=schedule,
        eval_every=config.train.eval_every,
        curve_episodes=config.train.curve_episodes,
        eval_episodes=config.eval.episodes,
        eval_seed=config.eval.seed,
        log_every=config.train.log_every,
    )
    save_checkpoint(checkpoint_path, result.learner, config.iql, meta={"task": config.task})

    summary = {
        "checkpoint": str(checkpoint_path),
        "iterations": result.learner.step,
        **result.report.as_dict(),
    }
    curve = previous + result.curve
    if curve:
        window = max(1, SMOOTHING_WINDOW // config.train.eval_every)
        write_csv(config.curve_path(), curve_csv(curve, smooth_curve(curve, window)))
        summary["curve"] = str(config.curve_path())
        summary["converged_at"] = iterations_to_convergence(curve, window=window)
    return summary


def cmd_eval(config: RunConfig) -> dict:
    checkpoint = load_checkpoint(config.checkpoint_path())
    task = checkpoint.meta.get("task", config.task)
    if task != config.task:
        raise ConfigError(f"Checkpoint treinado em {task}, configuração pede {config.task}")
    env = config.environment()
    schedule = _schedule_for(config) if checkpoint.learner.method == GCBC else None
    policy = learned_policy(checkpoint.learner, env, schedule)
    report = evaluate(policy, env, episodes=config.eval.episodes, seed=config.eval.seed)
    extra = {"task": config.task, "method": checkpoint.learner.method, "iterations": checkpoint.learner.step}
    path = write_csv(config.report_path(), report_csv(report, extra))
    return {"report": str(path), **extra, **report.as_dict()}


def fixture_trajectory_check(config: RunConfig) -> OracleResult:
    """Expert trajectories on the grid tasks, shaped with each task's bundled schedule."""
    params = config.verify.params
    worst, failures = 0.0, []
    for task_id in GRID_TASKS:
        env = make_environment(task_id)
        schedule = validate_schedule(parse_response(load_fixture(default_fixture_for(task_id)), task_id), env.spec).schedule
        dataset = generate_dataset(env, make_expert(env), expert_prob=1.0, n_trajectories=1, seed=config.verify.seed)
        shaped = augment_dataset(dataset, schedule, params)
        for traj in shaped.trajectories:
            trace = ProgressTrace.from_shaped(traj)
            worst = max(worst, telescoping_residual(trace, params))
            check = check_successful(trace.ks, shaped.K)
            if not check.successful:
                failures.append(f"{task_id}: {check.reason}")
    passed = worst <= TOLERANCE and not failures
    return OracleResult("fixture_trajectories", passed, len(GRID_TASKS), worst, "; ".join(failures))


def cmd_verify(config: RunConfig) -> dict:
    verify = config.verify
    results = run_oracle_suite(verify.params, samples=verify.samples, pairs=verify.pairs, seed=verify.seed, max_k=verify.max_k)
    results.append(fixture_trajectory_check(config))
    document = {
        "gamma": verify.gamma,
        "horizon": verify.horizon,
        "passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }
    path = write_json(config.verify_path(), document)
    return {"verify": str(path), "passed": document["passed"], **{r.name: r.passed for r in results}}


def cmd_stats(config: RunConfig) -> dict:
    env = config.environment()
    dataset = read_dataset(config.dataset_path())
    stats = dataset_stats(dataset)
    replayable = sum(replay_trajectory(env, traj) for traj in dataset.trajectories)
    document = {**stats.as_dict(), "replayable": replayable, "digest": dataset.digest}
    path = write_json(config.stats_path(), document)
    return {"stats": str(path), **document}


def cmd_value_map(config: RunConfig) -> dict:
    checkpoint = load_checkpoint(config.checkpoint_path())
    value_map = export_value_map(checkpoint.learner, get_spec(config.task))
    path = write_csv(config.value_map_path(), value_map.render())
    return {"value_map": str(path), "method": checkpoint.learner.method, "iterations": checkpoint.learner.step}


def cmd_ablate(config: RunConfig) -> dict:
    env = config.environment()
    dataset = read_dataset(config.dataset_path())
    rows = run_schedule_ablation(
        env,
        dataset,
        config.iql,
        seed=config.seed,
        eval_episodes=config.eval.episodes,
        network=config.network,
    )
    path = write_csv(config.ablation_path(), records_csv([row.as_dict() for row in rows]))
    return {"ablation": str(path), **{row.fixture: row.success_rate for row in rows}}


COMMANDS = {
    "plan": cmd_plan,
    "gen-data": cmd_gen_data,
    "augment": cmd_augment,
    "train": cmd_train,
    "eval": cmd_eval,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "value-map": cmd_value_map,
    "ablate": cmd_ablate,
}


def record_run(command: str, config: RunConfig | None, status: str, summary: dict, run_id: str = "") -> None:
    """Best effort: a missing ledger table never changes a command's outcome."""
    from core.models import RunRecord

    try:
        RunRecord.objects.create(
            command=command,
            task=config.task if config else "",
            method=config.method if config else "",
            seed=config.seed if config else 0,
            status=status,
            summary=summary,
            config_digest=config.digest if config else "",
            run_id=run_id,
        )
    except DatabaseError as exc:
        logger.warning(f"Ledger indisponível, execução {command} não registada: {exc}")
