import numpy as np
import pytest

from core.exceptions import ConfigError
from gridworlds.services.tasks import get_spec
from learner.services.batches import Batch, build_table
from learner.services.encoding import Encoder
from learner.services.gcbc import gcbc_loss, gcbc_update
from learner.services.iql import IQLHyper
from learner.services.network import NetworkSpec, forward
from learner.services.state import GCBC, IQL, init_learner, log_softmax

from .test_state import set_output


@pytest.fixture
def encoder():
    return Encoder(get_spec("cliffwalking"))


@pytest.fixture
def learner(encoder):
    return init_learner(GCBC, encoder, seed=3, network=NetworkSpec(hidden=(8,)), n_subgoals=4)


def one_sample(encoder, action=2, k=2):
    return Batch(
        states=encoder.states([(1, 4)]),
        actions=encoder.actions([action]),
        rewards=np.zeros(1),
        next_states=encoder.states([(1, 3)]),
        terminals=np.zeros(1),
        action_index=np.array([action]),
        subgoals=Encoder.subgoals([k], 4),
    )


def test_loss_is_negative_log_softmax(learner, encoder):
    batch = one_sample(encoder)
    loss, _, _ = gcbc_loss(learner, batch)
    logits = forward(learner.policy, np.concatenate([batch.states, batch.subgoals], axis=1))
    assert loss == pytest.approx(-log_softmax(logits)[0, 2], abs=1e-12)


def test_confident_policy_has_near_zero_loss(learner, encoder):
    set_output(learner.policy, [0.0, 0.0, 50.0, 0.0])
    loss, _, _ = gcbc_loss(learner, one_sample(encoder, action=2))
    assert loss < 1e-12


def test_updates_reduce_the_loss(learner, encoder):
    batch = one_sample(encoder)
    first = gcbc_update(learner, batch, IQLHyper(learning_rate=1e-2))
    for _ in range(100):
        last = gcbc_update(learner, batch, IQLHyper(learning_rate=1e-2))
    assert last < first
    assert learner.step == 101


def test_batch_without_subgoals(learner, encoder):
    batch = one_sample(encoder)
    plain = Batch(batch.states, batch.actions, batch.rewards, batch.next_states, batch.terminals, batch.action_index)
    with pytest.raises(ConfigError):
        gcbc_update(learner, plain, IQLHyper())


def test_wrong_method(encoder):
    iql = init_learner(IQL, encoder, seed=0, network=NetworkSpec(hidden=(8,)))
    with pytest.raises(ConfigError):
        gcbc_update(iql, one_sample(encoder), IQLHyper())


def test_trains_on_the_unshaped_rewards_of_a_shaped_dataset(cliff_shaped, encoder):
    table = build_table(cliff_shaped, encoder, shaped=False)
    assert table.subgoals.shape == (cliff_shaped.n_transitions, 4)
    assert set(np.unique(table.rewards).tolist()) <= {0.0, 1.0}
