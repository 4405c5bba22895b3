import math

import numpy as np
import pytest

from core.exceptions import ConfigError, DivergenceError, EmptyBatchError
from gridworlds.services.tasks import get_spec
from learner.services.batches import Batch, build_table
from learner.services.encoding import Encoder
from learner.services.iql import IQLHyper, expectile_loss, iql_update
from learner.services.network import NetworkSpec
from learner.services.state import IQL, STORL, init_learner

from .test_state import set_output


@pytest.fixture
def encoder():
    return Encoder(get_spec("cliffwalking"))


def single_batch(encoder, reward, terminal, action=0):
    states = encoder.states([(2, 11)])
    return Batch(
        states=states,
        actions=encoder.actions([action]),
        rewards=np.array([reward]),
        next_states=encoder.states([(3, 11)]),
        terminals=np.array([terminal]),
        action_index=np.array([action]),
    )


def tiny_learner(encoder, value, q1, q2):
    learner = init_learner(IQL, encoder, seed=0, network=NetworkSpec(hidden=(1,)))
    set_output(learner.networks["value"], value)
    for name, bias in (("q1", q1), ("q2", q2)):
        set_output(learner.networks[name], bias)
        set_output(learner.networks[f"{name}_target"], bias)
    set_output(learner.policy, 0.0)
    return learner


def test_hyper_validation():
    with pytest.raises(ConfigError):
        IQLHyper(expectile=0.5)
    with pytest.raises(ConfigError):
        IQLHyper(beta=0.0)
    with pytest.raises(ConfigError):
        IQLHyper(target_rate=1.5)


def test_expectile_half_is_half_mse():
    u = np.random.default_rng(0).normal(size=200)
    loss, grad = expectile_loss(u, 0.5)
    assert loss == pytest.approx(0.5 * np.mean(u * u), rel=1e-12)
    np.testing.assert_allclose(grad, u / u.size)


def test_expectile_weights_are_asymmetric():
    loss_pos, _ = expectile_loss(np.array([1.0]), 0.9)
    loss_neg, _ = expectile_loss(np.array([-1.0]), 0.9)
    assert loss_pos == pytest.approx(0.9)
    assert loss_neg == pytest.approx(0.1)


def test_single_transition_losses_match_hand_computation(encoder):
    learner = tiny_learner(encoder, value=0.2, q1=0.5, q2=0.7)
    losses = iql_update(learner, single_batch(encoder, reward=1.0, terminal=1.0), IQLHyper(), gamma=0.99)

    # u = min(0.5, 0.7) - 0.2 = 0.3 > 0, weight 0.9
    assert losses.value == pytest.approx(0.9 * 0.09, abs=1e-12)
    # TD target is the reward alone at the goal: ((0.5-1)^2 + (0.7-1)^2) / 2
    assert losses.q == pytest.approx(0.17, abs=1e-12)
    # uniform policy over 4 moves, AWR weight exp(3 * 0.3)
    assert losses.policy == pytest.approx(math.exp(0.9) * math.log(4), abs=1e-12)
    assert learner.step == 1


def test_fixed_point_leaves_critics_unchanged(encoder):
    learner = tiny_learner(encoder, value=0.0, q1=0.0, q2=0.0)
    before = {name: learner.networks[name].flat() for name in ("value", "q1", "q2")}

    losses = iql_update(learner, single_batch(encoder, reward=0.0, terminal=0.0), IQLHyper(), gamma=0.99)

    assert losses.value == 0.0
    assert losses.q == 0.0
    for name, flat in before.items():
        assert np.array_equal(learner.networks[name].flat(), flat)


def test_targets_are_blended_after_the_step(encoder):
    learner = tiny_learner(encoder, value=0.2, q1=0.5, q2=0.7)
    iql_update(learner, single_batch(encoder, 1.0, 1.0), IQLHyper(target_rate=1.0), gamma=0.99)
    assert np.array_equal(learner.networks["q1_target"].flat(), learner.networks["q1"].flat())


def test_empty_batch(encoder):
    learner = tiny_learner(encoder, 0.0, 0.0, 0.0)
    empty = Batch(
        states=np.zeros((0, 48)),
        actions=np.zeros((0, 4)),
        rewards=np.zeros(0),
        next_states=np.zeros((0, 48)),
        terminals=np.zeros(0),
        action_index=np.zeros(0, dtype=int),
    )
    with pytest.raises(EmptyBatchError):
        iql_update(learner, empty, IQLHyper(), gamma=0.99)


def test_non_finite_loss_aborts_before_any_step(encoder):
    learner = tiny_learner(encoder, value=float("nan"), q1=0.5, q2=0.7)
    policy = learner.policy.flat()
    with pytest.raises(DivergenceError):
        iql_update(learner, single_batch(encoder, 1.0, 1.0), IQLHyper(), gamma=0.99)
    assert learner.step == 0
    assert np.array_equal(learner.policy.flat(), policy)


def test_shaped_table_feeds_updates(cliff_shaped, encoder):
    table = build_table(cliff_shaped, encoder, shaped=True)
    assert len(table) == cliff_shaped.n_transitions
    assert table.terminals.sum() == 2

    learner = init_learner(STORL, encoder, seed=0, network=NetworkSpec(hidden=(16, 16)))
    rng = np.random.default_rng(0)
    for _ in range(5):
        losses = iql_update(learner, table.sample(rng, 8), IQLHyper(batch_size=8), gamma=0.99)
        assert losses.is_finite()
    assert learner.is_finite()
