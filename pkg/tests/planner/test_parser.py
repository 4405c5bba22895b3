import pytest

from core.exceptions import ScheduleParseError
from planner.services.fixtures import FIXTURES, fixture_task, load_fixture
from planner.services.parser import parse_response
from planner.services.schedule import progress_index


def test_minimal_input():
    schedule = parse_response("SubTask 1: 'x', containing states: (0,0)")
    assert schedule.K == 1
    assert schedule.h((0, 0)) == 1


def test_fourroom_fixture_corridor_subtask():
    schedule = parse_response(load_fixture("fourroom"), "fourroom")
    assert schedule.K == 3
    corridor = schedule.subgoals[1].cells
    assert corridor[:4] == ((2, 5), (8, 5), (5, 2), (5, 8))
    assert len(schedule.mapping) == 104


def test_cliffwalking_progress_indices():
    schedule = parse_response(load_fixture("cliffwalking"), "cliffwalking")
    assert schedule.K == 4
    assert progress_index(schedule, (3, 0)) == 1
    assert progress_index(schedule, (3, 11)) == 4
    assert progress_index(schedule, (2, 11)) == 3
    # (2,0) is listed twice: first listing wins
    assert progress_index(schedule, (2, 0)) == 1


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_every_fixture_parses(name):
    schedule = parse_response(load_fixture(name), fixture_task(name))
    assert schedule.K >= 1
    assert all(sg.cells for sg in schedule.subgoals)


def test_typographic_quotes_and_comments():
    text = (
        "{ SubTask 1: ‘Move’, containing states: “(1, 1), (1, 2)”,\n"
        "# a note from the reviewer (9, 9)\n"
        "SubTask 2: ‘Goal’, containing states: “(2, 2)”\n"
        "}"
    )
    schedule = parse_response(text)
    assert [sg.name for sg in schedule.subgoals] == ["Move", "Goal"]
    assert (9, 9) not in schedule.mapping


def test_range_shorthand_is_not_expanded():
    schedule = parse_response("SubTask 1: 'row', containing states: [3, 1..10], (3,0)")
    assert schedule.subgoals[0].cells == ((3, 0),)


def test_malformed_pair_reports_line_and_token():
    text = "{\nSubTask 1: 'x', containing states: (0,0),\n (a,b)\n}"
    with pytest.raises(ScheduleParseError) as excinfo:
        parse_response(text)
    assert excinfo.value.line == 3
    assert excinfo.value.token == "(a,b)"
    assert "(a,b)" in str(excinfo.value)


def test_line_numbers_count_comment_lines():
    text = "# header\n# more\nSubTask 1: 'x', containing states: (1,2,3)"
    with pytest.raises(ScheduleParseError) as excinfo:
        parse_response(text)
    assert excinfo.value.line == 3


def test_no_subtasks_is_an_error():
    with pytest.raises(ScheduleParseError):
        parse_response("nothing to see here (1, 1)")


def test_empty_text_is_an_error():
    with pytest.raises(ScheduleParseError):
        parse_response("   ")
