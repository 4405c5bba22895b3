"""Full-protocol runs. Deselected by default; run with `pytest -m slow`."""
import math
import statistics

import pytest

from gridworlds.services.tasks import make_environment
from harness.services.curves import iterations_to_convergence
from harness.services.datasets import generate_dataset
from harness.services.experiment import prepare_learner, train_and_evaluate
from harness.services.experts import make_expert
from learner.services.iql import IQLHyper
from learner.services.state import GCBC, IQL, STORL
from planner.services.fixtures import default_fixture_for, load_fixture
from planner.services.parser import parse_response
from planner.services.schedule import validate_schedule
from shaping.services.augment import augment_dataset
from shaping.services.potential import ShapingParams

pytestmark = pytest.mark.slow

OPTIMAL_STEPS = {"cliffwalking": 13.0, "fourroom": 20.0}


def prepare(task_id, n_trajectories=1000, data_seed=0):
    env = make_environment(task_id)
    expert_prob = 0.5 if env.discrete else 0.3
    dataset = generate_dataset(env, make_expert(env), expert_prob=expert_prob, n_trajectories=n_trajectories, seed=data_seed)
    schedule = validate_schedule(parse_response(load_fixture(default_fixture_for(task_id)), task_id), env.spec).schedule
    shaped = augment_dataset(dataset, schedule, ShapingParams(env.gamma, env.horizon))
    return env, dataset, shaped, schedule


def run_method(method, env, dataset, shaped, schedule, seed, iterations=1000, **kwargs):
    data = dataset if method == IQL else shaped
    learner = prepare_learner(method, env, data, seed)
    return train_and_evaluate(
        learner, env, data, IQLHyper(iterations=iterations), schedule=schedule, eval_seed=seed, **kwargs,
    )


@pytest.mark.parametrize("task_id", ["cliffwalking", "fourroom"])
@pytest.mark.parametrize("method", [STORL, IQL, GCBC])
def test_grid_tasks_reach_the_optimal_path(task_id, method):
    env, dataset, shaped, schedule = prepare(task_id)
    result = run_method(method, env, dataset, shaped, schedule, seed=0, curve_episodes=0)
    assert result.report.success_rate == 1.0
    assert result.report.mean_steps == OPTIMAL_STEPS[task_id]
    assert result.report.std_steps == 0.0


@pytest.mark.parametrize("task_id", ["cliffwalking", "fourroom"])
def test_shaping_converges_no_later_than_iql(task_id):
    env, dataset, shaped, schedule = prepare(task_id)

    def median_convergence(method):
        values = []
        for seed in range(5):
            result = run_method(method, env, dataset, shaped, schedule, seed=seed, eval_episodes=10)
            converged = iterations_to_convergence(result.curve, window=5)
            values.append(math.inf if converged is None else converged)
        return statistics.median(values)

    assert median_convergence(STORL) <= median_convergence(IQL)


def test_umaze_ordering():
    env, dataset, shaped, schedule = prepare("umaze", n_trajectories=300)
    reports = {method: [] for method in (STORL, IQL, GCBC)}
    for seed in range(5):
        for method in reports:
            result = run_method(method, env, dataset, shaped, schedule, seed=seed, curve_episodes=0)
            reports[method].append(result.report)

    def mean_success(method):
        return statistics.mean(r.success_rate for r in reports[method])

    def mean_successful_steps(method):
        steps = [r.success_mean_steps for r in reports[method] if r.success_mean_steps is not None]
        return statistics.mean(steps) if steps else math.inf

    assert mean_success(STORL) >= mean_success(IQL)
    assert mean_successful_steps(STORL) <= mean_successful_steps(GCBC)
