import numpy as np
import pytest

from core.exceptions import UnknownTaskError
from gridworlds.services.maps import load_bundled_map, load_map_text, render_map_text
from gridworlds.services.tasks import (
    GridEnvironment,
    MazeEnvironment,
    get_spec,
    make_environment,
    reset,
)


def test_umaze_matrix():
    matrix = load_bundled_map("umaze")
    assert matrix.rows == (
        ("1", "1", "1", "1", "1"),
        ("1", "r", "0", "0", "1"),
        ("1", "1", "1", "0", "1"),
        ("1", "g", "0", "0", "1"),
        ("1", "1", "1", "1", "1"),
    )
    assert matrix.start == (1, 1)
    assert matrix.goal == (3, 1)


def test_medium_matrix_shape():
    matrix = load_bundled_map("medium")
    assert (matrix.height, matrix.width) == (8, 8)
    assert matrix.start == (1, 1)
    assert matrix.goal == (6, 5)
    assert 64 - len(matrix.walls) == 26


def test_separators_and_comments():
    text = "# comment\n1,1,1\n1 r 1\n1g1\n\n1 1 1\n"
    matrix = load_map_text(text)
    assert matrix.height == 4
    assert matrix.symbol(2, 1) == "g"
    assert load_map_text(render_map_text(matrix)) == matrix


@pytest.mark.parametrize(
    "text",
    [
        "",
        "1 r\n1 g 1\n",
        "1 r x\n1 g 1\n",
        "1 0 1\n1 g 1\n",
        "r r\ng 0\n",
    ],
)
def test_invalid_maps_are_rejected(text):
    with pytest.raises(ValueError):
        load_map_text(text)


def test_task_horizons_and_discounts():
    assert (get_spec("cliffwalking").horizon, get_spec("cliffwalking").gamma) == (100, 0.99)
    assert (get_spec("fourroom").horizon, get_spec("fourroom").gamma) == (100, 0.99)
    assert (get_spec("umaze").horizon, get_spec("umaze").gamma) == (200, 0.996)
    assert (get_spec("medium").horizon, get_spec("medium").gamma) == (500, 0.999)


def test_overrides_and_unknown_task():
    assert get_spec("cliffwalking", gamma=0.995).gamma == 0.995
    assert get_spec("cliffwalking", gamma=None).gamma == 0.99
    with pytest.raises(UnknownTaskError):
        get_spec("antmaze")


def test_make_environment_picks_family():
    assert isinstance(make_environment("fourroom"), GridEnvironment)
    env = make_environment("umaze", horizon=50)
    assert isinstance(env, MazeEnvironment)
    assert env.horizon == 50
    assert not env.discrete
    assert env.n_actions == 2


def test_reset():
    assert reset(get_spec("cliffwalking")) == (3, 0)
    start = reset(get_spec("umaze"), seed=3)
    assert start == reset(get_spec("umaze"), seed=3)
    assert get_spec("umaze").is_free_point(start.x, start.y)


def test_maze_environment_random_action_in_bounds():
    env = make_environment("medium")
    rng = np.random.default_rng(0)
    for _ in range(100):
        fx, fy = env.random_action(rng)
        assert -1.0 <= fx <= 1.0 and -1.0 <= fy <= 1.0
