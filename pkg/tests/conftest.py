import pytest

from gridworlds.services.grid import Action, bfs_shortest_path, grid_step
from gridworlds.services.records import Dataset, Trajectory, Transition
from gridworlds.services.tasks import get_spec
from planner.services.fixtures import load_fixture
from planner.services.parser import parse_response
from planner.services.schedule import validate_schedule


def _action_between(spec, a, b):
    for action in Action:
        if grid_step(spec, a, action).state == b:
            return action
    raise AssertionError(f"no action from {a} to {b}")


def shortest_path_trajectory(spec):
    path = bfs_shortest_path(spec)
    transitions = []
    for t, (a, b) in enumerate(zip(path, path[1:])):
        action = _action_between(spec, a, b)
        state, reward, done = grid_step(spec, a, action)
        transitions.append(Transition(tuple(a), int(action), tuple(state), reward, t, done))
    return Trajectory(tuple(transitions), success=True)


@pytest.fixture
def cliff_spec():
    return get_spec("cliffwalking")


@pytest.fixture
def cliff_schedule(cliff_spec):
    return validate_schedule(parse_response(load_fixture("cliffwalking"), "cliffwalking"), cliff_spec).schedule


@pytest.fixture
def cliff_dataset(cliff_spec):
    path = shortest_path_trajectory(cliff_spec)
    stuck = Trajectory(
        tuple(Transition((3, 0), int(Action.LEFT), (3, 0), 0.0, t, t == 4) for t in range(5)),
        success=False,
    )
    return Dataset(env_id="cliffwalking", trajectories=(path, stuck, path), seed=0)


@pytest.fixture
def cliff_shaped(cliff_dataset, cliff_schedule):
    from shaping.services.augment import augment_dataset
    from shaping.services.potential import ShapingParams

    return augment_dataset(cliff_dataset, cliff_schedule, ShapingParams(gamma=0.99, horizon=100))
