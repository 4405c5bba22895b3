import numpy as np
import pytest

from core.exceptions import ArtifactIOError, CheckpointFormatError, ConfigError
from gridworlds.services.tasks import get_spec
from learner.services.batches import build_table
from learner.services.checkpoint import checkpoint_bytes, load_checkpoint, parse_checkpoint, save_checkpoint
from learner.services.encoding import Encoder
from learner.services.iql import IQLHyper
from learner.services.network import NetworkSpec
from learner.services.state import GCBC, STORL, init_learner
from learner.services.trainer import train_learner

HYPER = IQLHyper(batch_size=8, iterations=6)


@pytest.fixture
def encoder():
    return Encoder(get_spec("cliffwalking"))


@pytest.fixture
def trained(cliff_shaped, encoder):
    learner = init_learner(STORL, encoder, seed=5, network=NetworkSpec(hidden=(16,)))
    train_learner(learner, build_table(cliff_shaped, encoder, shaped=True), HYPER, gamma=0.99, iterations=3)
    return learner


def test_bytes_round_trip(trained):
    data = checkpoint_bytes(trained, HYPER, {"task_id": "cliffwalking"})
    restored = parse_checkpoint(data)

    assert checkpoint_bytes(restored.learner, restored.hyper, restored.meta) == data
    assert restored.hyper == HYPER
    assert restored.meta == {"task_id": "cliffwalking"}
    assert restored.learner.step == 3
    for name, net in trained.networks.items():
        assert np.array_equal(restored.learner.networks[name].flat(), net.flat())
    assert restored.learner.optimizers["policy"].step == 3


def test_resumed_training_is_identical(trained, cliff_shaped, encoder, tmp_path):
    path = save_checkpoint(tmp_path / "ckpt" / "storl.ckpt", trained, HYPER)
    resumed = load_checkpoint(path).learner
    table = build_table(cliff_shaped, encoder, shaped=True)

    train_learner(trained, table, HYPER, gamma=0.99)
    train_learner(resumed, table, HYPER, gamma=0.99)

    assert resumed.step == trained.step == 6
    for name in trained.networks:
        assert np.array_equal(resumed.networks[name].flat(), trained.networks[name].flat())


def test_gcbc_checkpoint(encoder):
    learner = init_learner(GCBC, encoder, seed=1, network=NetworkSpec(hidden=(4,)), n_subgoals=4)
    restored = parse_checkpoint(checkpoint_bytes(learner, HYPER)).learner
    assert restored.method == GCBC
    assert restored.n_subgoals == 4
    assert restored.policy.input_width == 52


def test_truncated_payload(trained):
    data = checkpoint_bytes(trained, HYPER)
    with pytest.raises(CheckpointFormatError):
        parse_checkpoint(data[:-8])
    with pytest.raises(CheckpointFormatError):
        parse_checkpoint(b"not a checkpoint")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_checkpoint(tmp_path / "absent.ckpt")


def test_directory_in_place_of_checkpoint(trained, tmp_path):
    target = tmp_path / "storl-seed0.ckpt"
    target.mkdir()
    with pytest.raises(ArtifactIOError):
        save_checkpoint(target, trained, HYPER)
    with pytest.raises(ArtifactIOError):
        load_checkpoint(target)
