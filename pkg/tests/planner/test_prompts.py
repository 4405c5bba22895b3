import pytest

from core.exceptions import UnknownTaskError
from gridworlds.services.maps import load_map_text
from planner.services.prompts import build_prompt


def test_cliffwalking_prompt_describes_cliff():
    prompt = build_prompt("cliffwalking")
    assert "A cliff runs along [3, 1..10]" in prompt.text
    assert "CliffWalking Task" in prompt.text


def test_umaze_prompt_contains_matrix():
    prompt = build_prompt("umaze")
    assert "U_MAZE = [" in prompt.map_block
    assert "[1, r, 0, 0, 1]" in prompt.map_block
    assert "[1, g, 0, 0, 1]" in prompt.map_block


@pytest.mark.parametrize("task_id", ["cliffwalking", "fourroom", "umaze", "medium"])
def test_prompt_carries_both_hints(task_id):
    text = build_prompt(task_id).text
    assert "cover all states in the maze map EXCEPT the walls" in text
    assert "Each state can only be assigned to one sub-task" in text
    assert "SubTask 1" in text


def test_custom_matrix_is_rendered():
    matrix = load_map_text("1 1 1\n1 r 1\n1 g 1\n")
    prompt = build_prompt("umaze", matrix)
    assert "[1, r, 1]" in prompt.map_block


def test_unknown_task_raises():
    with pytest.raises(UnknownTaskError):
        build_prompt("antmaze")
