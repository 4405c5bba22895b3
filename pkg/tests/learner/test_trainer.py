import logging

import numpy as np
import pytest

from core.exceptions import ConfigError
from gridworlds.services.tasks import get_spec
from learner.services.batches import build_table
from learner.services.encoding import Encoder
from learner.services.iql import IQLHyper
from learner.services.network import NetworkSpec
from learner.services.state import GCBC, IQL, init_learner
from learner.services.trainer import train_learner


@pytest.fixture
def encoder():
    return Encoder(get_spec("cliffwalking"))


def test_evaluator_cadence(cliff_shaped, encoder):
    learner = init_learner(IQL, encoder, seed=0, network=NetworkSpec(hidden=(8,)))
    table = build_table(cliff_shaped, encoder)
    seen = []

    run = train_learner(
        learner,
        table,
        IQLHyper(batch_size=4),
        gamma=0.99,
        iterations=25,
        evaluator=lambda step, _: seen.append(step) or step,
    )

    assert seen == [10, 20, 25]
    assert run.evaluations == [10, 20, 25]
    assert run.iterations == 25


def test_progress_lines_carry_step_and_losses(cliff_shaped, encoder, caplog):
    learner = init_learner(IQL, encoder, seed=0, network=NetworkSpec(hidden=(8,)))
    table = build_table(cliff_shaped, encoder)
    with caplog.at_level(logging.INFO, logger="learner.services.trainer"):
        train_learner(learner, table, IQLHyper(batch_size=4), gamma=0.99, iterations=4, log_every=2)

    progress = [r for r in caplog.records if hasattr(r, "step")]
    assert [r.step for r in progress] == [2, 4]
    assert set(progress[0].losses) == {"value", "q", "policy"}

def test_same_seed_is_bit_reproducible(cliff_shaped, encoder):
    table = build_table(cliff_shaped, encoder, shaped=True)
    flats = []
    for _ in range(2):
        learner = init_learner("storl", encoder, seed=4, network=NetworkSpec(hidden=(8,)))
        train_learner(learner, table, IQLHyper(batch_size=4), gamma=0.99, iterations=12)
        flats.append(np.concatenate([net.flat() for net in learner.networks.values()]))
    assert np.array_equal(flats[0], flats[1])


def test_gcbc_dispatch(cliff_shaped, encoder):
    learner = init_learner(GCBC, encoder, seed=0, network=NetworkSpec(hidden=(8,)), n_subgoals=4)
    run = train_learner(learner, build_table(cliff_shaped, encoder), IQLHyper(batch_size=4), gamma=0.99, iterations=3)
    assert isinstance(run.last_losses, float)
    assert learner.step == 3


def test_target_behind_current_step(cliff_shaped, encoder):
    learner = init_learner(IQL, encoder, seed=0, network=NetworkSpec(hidden=(8,)))
    learner.step = 5
    with pytest.raises(ConfigError):
        train_learner(learner, build_table(cliff_shaped, encoder), IQLHyper(), gamma=0.99, iterations=2)
