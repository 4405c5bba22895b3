"""
Construção dos prompts Σ(l, S) enviados ao LLM.

The wording is kept verbatim for the four tasks: the bundled fixture responses
were produced against exactly these prompts.
"""
from __future__ import annotations

from dataclasses import dataclass

from core.exceptions import UnknownTaskError
from gridworlds.services.grid import GridSpec
from gridworlds.services.maps import MapMatrix, load_bundled_map
from gridworlds.services.tasks import CLIFFWALKING, FOURROOM, MEDIUM, UMAZE, cliffwalking_spec

RESPONSE_FORMAT = (
    "Your response should be like:\n"
    "{ SubTask 1: ‘Move to place’, containing states: “(1, 1), (1, 2),……”\n"
    ",……,\n"
    "‘SubTask N: ‘Move to goal’, containing states:”……”\n"
    "}\n"
)

HINTS = (
    "(Hint: the subtask sequence should cover all states in the maze map EXCEPT the walls)\n"
    "(Hint: Each state can only be assigned to one sub-task)\n"
)

LEGEND = (
    "Where ‘r’ is the Start State, ‘g’ is the Goal State, ‘1’ are walls and ‘0’ are paths "
    "where the agent can move."
)

_MATRIX_NAMES = {FOURROOM: "FOUR_ROOM", UMAZE: "U_MAZE", MEDIUM: "MEDIUM_MAZE"}

_INSTRUCTIONS = {
    CLIFFWALKING: (
        "You need to establish an ordered sub-task sequence for a CliffWalking Task, crossing a "
        "gridworld from Start State to Goal State while avoiding falling off a cliff. "
        "The map of maze is listed below:"
    ),
    FOURROOM: (
        "You need to establish an ordered sub-task sequence for a FourRoom Task to navigate from "
        "Start State to Goal State. The map of FourRoom is listed below:"
    ),
    UMAZE: (
        "You need to establish an ordered sub-task sequence for a Maze Navigation Task from Start "
        "State to Goal State. The map of maze is listed below:"
    ),
    MEDIUM: (
        "You need to establish an ordered sub-task sequence for a Maze Navigation Task from Start "
        "State to Goal State. The map of maze is listed below:"
    ),
}


@dataclass(frozen=True)
class PromptRequest:
    task_id: str
    instruction: str
    map_block: str
    response_format: str

    @property
    def text(self) -> str:
        return f"{self.instruction}\n\n{self.map_block}\n{self.response_format}{HINTS}"


def render_matrix(name: str, matrix: MapMatrix) -> str:
    rows = ",\n".join("  [" + ", ".join(row) + "]" for row in matrix.rows)
    return f"{name} = [\n{rows}\n]\n\n{LEGEND}\n"


def describe_cliffwalking(spec: GridSpec) -> str:
    cliff_row = min(r for r, _ in spec.cliff)
    cliff_cols = sorted(c for _, c in spec.cliff)
    return (
        f"The environment is a the {spec.height}x{spec.width} grid world.\n"
        f"The game starts with the player at location [{spec.start.row}, {spec.start.col}].\n"
        f"The goal located at [{spec.goal.row}, {spec.goal.col}].\n"
        f"A cliff runs along [{cliff_row}, {cliff_cols[0]}..{cliff_cols[-1]}].\n"
    )


def build_prompt(task_id: str, map_matrix: MapMatrix | None = None) -> PromptRequest:
    if task_id not in _INSTRUCTIONS:
        raise UnknownTaskError(f"Tarefa desconhecida: {task_id!r}")

    if task_id == CLIFFWALKING:
        map_block = describe_cliffwalking(cliffwalking_spec())
    else:
        matrix = map_matrix if map_matrix is not None else load_bundled_map(task_id)
        map_block = render_matrix(_MATRIX_NAMES[task_id], matrix)

    return PromptRequest(
        task_id=task_id,
        instruction=_INSTRUCTIONS[task_id],
        map_block=map_block,
        response_format=RESPONSE_FORMAT,
    )
