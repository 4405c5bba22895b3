import json

import pytest

from core.config import load_config
from core.exceptions import ConfigError, PlannerAuthError
from core.services.pipeline import (
    cmd_ablate,
    cmd_augment,
    cmd_eval,
    cmd_gen_data,
    cmd_plan,
    cmd_stats,
    cmd_train,
    cmd_value_map,
    cmd_verify,
)
from harness.services.io import read_curve, read_schedule, read_shaped
from planner.services.parser import parse_response


def small_config(tmp_path, task="cliffwalking", method="storl", *extra, **flags):
    overrides = [
        f"paths.root={json.dumps(str(tmp_path))}",
        'planner.mode="fixture"',
        "dataset.n_trajectories=20",
        "iql.iterations=20",
        "iql.batch_size=32",
        "network.hidden=[16]",
        "train.curve_episodes=2",
        "train.log_every=10",
        "eval.episodes=3",
        "verify.samples=2000",
        "verify.pairs=50",
        *extra,
    ]
    return load_config(overrides=overrides, task=task, method=method, **flags)


@pytest.fixture
def prepared(tmp_path):
    config = small_config(tmp_path)
    cmd_plan(config)
    cmd_gen_data(config)
    cmd_augment(config)
    return config


def test_plan_from_fixture(tmp_path):
    config = small_config(tmp_path)
    summary = cmd_plan(config)
    assert summary["K"] == 4
    assert summary["planner"] == "fixture"
    schedule = read_schedule(config.schedule_path())
    assert schedule.digest == summary["digest"]
    rendered = config.schedule_path().with_suffix(".txt").read_text(encoding="utf-8")
    assert rendered.startswith("{")
    again = parse_response(rendered, "cliffwalking")
    assert again.digest == summary["digest"]
    assert again.mapping == schedule.mapping


def test_plan_accepts_flawed_schedule(tmp_path):
    # covers every free cell once, so it passes validation despite the dead end
    config = small_config(tmp_path, "medium", "storl", 'planner.fixture="medium_flawed_2"')
    summary = cmd_plan(config)
    assert summary["K"] == 5
    assert summary["source"] == "medium_flawed_2"
    assert read_schedule(config.schedule_path()).K == 5


def test_plan_live_needs_a_credential(tmp_path, monkeypatch):
    monkeypatch.delenv("STORL_TEST_MISSING_KEY", raising=False)
    config = small_config(
        tmp_path,
        "cliffwalking",
        "storl",
        'planner.mode="live"',
        'planner.base_url="https://llm.example.com/v1"',
        'planner.model="some-model"',
        'planner.api_key_env="STORL_TEST_MISSING_KEY"',
    )
    with pytest.raises(ConfigError):
        cmd_plan(config)


def test_plan_live_auth_failure(tmp_path, monkeypatch):
    class Refusing:
        status_code = 401

    class Session:
        def post(self, *args, **kwargs):
            return Refusing()

    monkeypatch.setenv("STORL_TEST_KEY", "sk-test")
    config = small_config(
        tmp_path,
        "cliffwalking",
        "storl",
        'planner.mode="live"',
        'planner.base_url="https://llm.example.com/v1"',
        'planner.model="some-model"',
        'planner.api_key_env="STORL_TEST_KEY"',
    )
    with pytest.raises(PlannerAuthError):
        cmd_plan(config, session=Session())


def test_gen_data_is_byte_identical(tmp_path):
    config = small_config(tmp_path)
    first = cmd_gen_data(config)
    data = config.dataset_path().read_bytes()
    second = cmd_gen_data(config)
    assert config.dataset_path().read_bytes() == data
    assert first == second
    assert first["trajectories"] == 20


def test_augment_without_schedule(tmp_path):
    config = small_config(tmp_path)
    cmd_gen_data(config)
    with pytest.raises(ConfigError):
        cmd_augment(config)


def test_augment_without_dataset(tmp_path):
    config = small_config(tmp_path)
    cmd_plan(config)
    with pytest.raises(ConfigError):
        cmd_augment(config)


def test_augment_writes_progress(prepared):
    shaped = read_shaped(prepared.shaped_path())
    assert shaped.K == 4
    assert len(shaped) == 20
    assert all(tr.k >= 1 for traj in shaped.trajectories for tr in traj.transitions)


def test_train_eval_and_exports(prepared):
    summary = cmd_train(prepared)
    assert summary["iterations"] == 20
    assert summary["episodes"] == 3
    assert [p.iteration for p in read_curve(prepared.curve_path())] == [0, 10, 20]

    report = cmd_eval(prepared)
    assert report["method"] == "storl"
    assert report["iterations"] == 20
    assert prepared.report_path().read_text().startswith("task,method,iterations,episodes")

    value_map = cmd_value_map(prepared)
    assert len(prepared.value_map_path().read_text().splitlines()) == 4
    assert value_map["iterations"] == 20


def test_train_is_deterministic(prepared):
    cmd_train(prepared)
    first = prepared.checkpoint_path().read_bytes()
    curve = prepared.curve_path().read_bytes()
    cmd_train(prepared)
    assert prepared.checkpoint_path().read_bytes() == first
    assert prepared.curve_path().read_bytes() == curve


def test_resume_matches_an_uninterrupted_run(tmp_path, prepared):
    cmd_train(prepared)
    uninterrupted = prepared.checkpoint_path().read_bytes()

    halfway = small_config(tmp_path, "cliffwalking", "storl", iterations=10)
    cmd_train(halfway)
    resumed = small_config(tmp_path, "cliffwalking", "storl", iterations=20, resume=True)
    summary = cmd_train(resumed)
    assert summary["iterations"] == 20
    assert resumed.checkpoint_path().read_bytes() == uninterrupted
    assert [p.iteration for p in read_curve(resumed.curve_path())] == [0, 10, 20]


def test_resume_rejects_a_target_behind_the_checkpoint(tmp_path, prepared):
    cmd_train(prepared)
    with pytest.raises(ConfigError):
        cmd_train(small_config(tmp_path, "cliffwalking", "storl", iterations=5, resume=True))


def test_iql_trains_on_the_plain_dataset(tmp_path):
    config = small_config(tmp_path, "cliffwalking", "iql")
    cmd_gen_data(config)
    assert cmd_train(config)["iterations"] == 20


def test_gcbc_needs_the_schedule(tmp_path, prepared):
    gcbc = small_config(tmp_path, "cliffwalking", "gcbc")
    assert cmd_train(gcbc)["iterations"] == 20
    prepared.schedule_path().unlink()
    with pytest.raises(ConfigError):
        cmd_eval(gcbc)


def test_eval_rejects_checkpoint_from_another_task(tmp_path, prepared):
    cmd_train(prepared)
    other = small_config(tmp_path, "fourroom", "storl", f"paths.checkpoint={json.dumps(str(prepared.checkpoint_path()))}")
    with pytest.raises(ConfigError):
        cmd_eval(other)


def test_eval_without_checkpoint(tmp_path):
    with pytest.raises(ConfigError):
        cmd_eval(small_config(tmp_path))


def test_verify_passes_with_strict_gamma(tmp_path):
    config = small_config(tmp_path)
    summary = cmd_verify(config)
    assert summary["passed"]
    assert summary["fixture_trajectories"]
    document = json.loads(config.verify_path().read_text())
    assert [c["name"] for c in document["checks"]] == [
        "progress_gain", "stall_penalty", "equal_length", "shorter_wins", "telescoping", "fixture_trajectories",
    ]


def test_verify_flags_boundary_gamma(tmp_path):
    summary = cmd_verify(small_config(tmp_path, "cliffwalking", "storl", "verify.gamma=0.99"))
    assert summary["passed"] is False
    assert summary["shorter_wins"] is False


def test_stats_replays_every_trajectory(tmp_path):
    config = small_config(tmp_path)
    cmd_gen_data(config)
    summary = cmd_stats(config)
    assert summary["replayable"] == summary["trajectories"] == 20
    assert json.loads(config.stats_path().read_text())["digest"] == summary["digest"]


def test_value_map_needs_a_grid_task(tmp_path):
    config = small_config(tmp_path, "umaze", "storl", "dataset.n_trajectories=2")
    cmd_plan(config)
    cmd_gen_data(config)
    cmd_augment(config)
    cmd_train(config)
    with pytest.raises(ConfigError):
        cmd_value_map(config)


def test_ablation_rows(tmp_path):
    config = small_config(tmp_path, "medium", "storl", "dataset.n_trajectories=3", "iql.iterations=5", "eval.episodes=1")
    cmd_gen_data(config)
    summary = cmd_ablate(config)
    assert set(summary) == {"ablation", "medium", "medium_flawed_1", "medium_flawed_2"}
    lines = config.ablation_path().read_text().splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("fixture,schedule_digest,K,accepted")
