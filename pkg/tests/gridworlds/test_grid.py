import pytest

from core.exceptions import InvalidActionError, InvalidStateError
from gridworlds.services.grid import (
    Action,
    DiscreteState,
    bfs_distances,
    bfs_shortest_path,
    grid_step,
)
from gridworlds.services.tasks import cliffwalking_spec, fourroom_spec


@pytest.fixture
def cliff():
    return cliffwalking_spec()


@pytest.fixture
def fourroom():
    return fourroom_spec()


def test_cliff_sends_agent_back_to_start(cliff):
    result = grid_step(cliff, (3, 0), Action.RIGHT)
    assert result == ((3, 0), 0.0, False)


def test_goal_gives_reward_and_terminates(cliff):
    state, reward, done = grid_step(cliff, (2, 11), Action.DOWN)
    assert state == (3, 11)
    assert reward == 1.0
    assert done


def test_blocked_move_is_a_self_transition(fourroom):
    assert grid_step(fourroom, (0, 4), Action.RIGHT) == ((0, 4), 0.0, False)
    assert grid_step(fourroom, (0, 0), Action.UP) == ((0, 0), 0.0, False)


def test_wall_state_is_rejected(fourroom):
    with pytest.raises(InvalidStateError):
        grid_step(fourroom, (0, 5), Action.LEFT)
    with pytest.raises(InvalidStateError):
        grid_step(fourroom, (11, 0), Action.LEFT)


def test_bad_action_is_rejected(cliff):
    with pytest.raises(InvalidActionError):
        grid_step(cliff, (0, 0), 7)


def test_reward_is_one_exactly_at_goal(cliff, fourroom):
    for spec in (cliff, fourroom):
        for cell in spec.free_cells():
            if cell == spec.goal:
                continue
            for action in Action:
                state, reward, done = grid_step(spec, cell, action)
                assert reward in (0.0, 1.0)
                assert (reward == 1.0) == (state == spec.goal) == done


def test_dynamics_are_pure(fourroom):
    assert grid_step(fourroom, (2, 4), Action.RIGHT) == grid_step(fourroom, (2, 4), Action.RIGHT)


def test_fourroom_layout(fourroom):
    assert (fourroom.height, fourroom.width) == (11, 11)
    assert fourroom.start == DiscreteState(0, 0)
    assert fourroom.goal == DiscreteState(10, 10)
    assert len(fourroom.free_cells()) == 104
    for gap in [(5, 2), (5, 8), (2, 5), (8, 5)]:
        assert not fourroom.is_wall(gap)


def test_fourroom_is_connected(fourroom):
    assert set(bfs_distances(fourroom)) == set(fourroom.free_cells())


def test_cliffwalking_shortest_path(cliff):
    distances = bfs_distances(cliff)
    assert distances[cliff.goal] == 13
    path = bfs_shortest_path(cliff)
    assert path[0] == cliff.start
    assert path[-1] == cliff.goal
    assert len(path) == 14
    assert not any(tuple(cell) in cliff.cliff for cell in path)
