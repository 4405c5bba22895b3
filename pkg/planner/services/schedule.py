"""
SubgoalSchedule: sequência ordenada de sub-objectivos e o mapeamento h.

Validation repairs imperfect LLM output instead of failing:
- a cell listed by several subtasks keeps the earliest one;
- cells inside walls (or off the map) are dropped;
- uncovered free cells inherit the index of the nearest covered cell by
  Manhattan distance, ties going to the smaller index.
A schedule is rejected only when h(start) != 1 or h(goal) != K after repair
(or, in strict mode, when duplicates were present).
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field

from core.exceptions import InvalidStateError, ScheduleParseError

logger = logging.getLogger(__name__)

Cell = tuple[int, int]

DOCUMENT_FORMAT = "storl-schedule"
DOCUMENT_VERSION = 1


@dataclass(frozen=True)
class Provenance:
    kind: str  # "fixture" | "llm"
    source: str
    timestamp: str | None = None

    def as_dict(self) -> dict:
        return {"kind": self.kind, "source": self.source, "timestamp": self.timestamp}


@dataclass(frozen=True)
class Subgoal:
    name: str
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class SubgoalSchedule:
    task_id: str
    subgoals: tuple[Subgoal, ...]
    mapping: dict[Cell, int] = field(hash=False)
    provenance: Provenance = Provenance("fixture", "unknown")

    @classmethod
    def from_subgoals(cls, task_id: str, subgoals, provenance: Provenance | None = None) -> SubgoalSchedule:
        """Builds h from the listing; a cell listed twice keeps its first index."""
        subgoals = tuple(subgoals)
        mapping: dict[Cell, int] = {}
        for k, subgoal in enumerate(subgoals, start=1):
            for cell in subgoal.cells:
                mapping.setdefault(cell, k)
        return cls(
            task_id=task_id,
            subgoals=subgoals,
            mapping=mapping,
            provenance=provenance or Provenance("fixture", task_id),
        )

    @property
    def K(self) -> int:
        return len(self.subgoals)

    @property
    def digest(self) -> str:
        payload = {
            "task_id": self.task_id,
            "subgoals": [[sg.name, [list(c) for c in sg.cells]] for sg in self.subgoals],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    def h(self, cell) -> int:
        return self.mapping[(int(cell[0]), int(cell[1]))]


@dataclass(frozen=True)
class ValidationReport:
    uncovered: tuple[Cell, ...]
    duplicates: tuple[tuple[Cell, tuple[int, ...]], ...]
    in_walls: tuple[Cell, ...]
    start_index: int | None
    goal_index: int | None
    accepted: bool
    schedule: SubgoalSchedule
    notes: tuple[str, ...] = ()

    @property
    def endpoint_violations(self) -> tuple[str, ...]:
        issues = []
        if self.start_index != 1:
            issues.append(f"h(start)={self.start_index}, esperado 1")
        if self.goal_index != self.schedule.K:
            issues.append(f"h(goal)={self.goal_index}, esperado K={self.schedule.K}")
        return tuple(issues)


def _nearest_index(cell: Cell, covered: dict[Cell, int]) -> int:
    best_distance = math.inf
    best_index = math.inf
    for other, k in covered.items():
        distance = abs(other[0] - cell[0]) + abs(other[1] - cell[1])
        if distance < best_distance or (distance == best_distance and k < best_index):
            best_distance, best_index = distance, k
    return int(best_index)


def validate_schedule(schedule: SubgoalSchedule, spec, strict: bool = False) -> ValidationReport:
    """Check a parsed schedule against a grid or maze spec and repair what can be repaired.

    `spec` only needs `height`, `width`, `walls`, and start/goal cells
    (`start`/`goal` on grids, `start_cell`/`goal_cell` on mazes).
    """
    walls = set(spec.walls)
    free = [
        (r, c)
        for r in range(spec.height)
        for c in range(spec.width)
        if (r, c) not in walls
    ]
    free_set = set(free)
    start = tuple(getattr(spec, "start_cell", None) or spec.start)
    goal = tuple(getattr(spec, "goal_cell", None) or spec.goal)

    listings: dict[Cell, list[int]] = {}
    for k, subgoal in enumerate(schedule.subgoals, start=1):
        for cell in subgoal.cells:
            listings.setdefault(cell, [])
            if k not in listings[cell]:
                listings[cell].append(k)

    duplicates = tuple(
        (cell, tuple(ks)) for cell, ks in sorted(listings.items()) if len(ks) > 1
    )
    in_walls = tuple(sorted(cell for cell in listings if cell not in free_set))

    covered = {cell: ks[0] for cell, ks in listings.items() if cell in free_set}
    uncovered = tuple(cell for cell in free if cell not in covered)

    notes: list[str] = []
    for cell, ks in duplicates:
        notes.append(f"{cell} listada nas subtarefas {list(ks)}; mantida na {ks[0]}")
    for cell in in_walls:
        notes.append(f"{cell} não é uma célula livre; removida")

    repaired = dict(covered)
    if covered:
        for cell in uncovered:
            repaired[cell] = _nearest_index(cell, covered)
            notes.append(f"{cell} sem subtarefa; herda índice {repaired[cell]}")

    # Rebuild each subgoal's cell list so that it is exactly the preimage of h.
    rebuilt = []
    for k, subgoal in enumerate(schedule.subgoals, start=1):
        kept = [cell for cell in dict.fromkeys(subgoal.cells) if repaired.get(cell) == k and covered.get(cell) == k]
        added = sorted(cell for cell in uncovered if repaired.get(cell) == k)
        rebuilt.append(Subgoal(name=subgoal.name, cells=tuple(kept + added)))

    fixed = SubgoalSchedule(
        task_id=schedule.task_id,
        subgoals=tuple(rebuilt),
        mapping=repaired,
        provenance=schedule.provenance,
    )

    start_index = repaired.get(start)
    goal_index = repaired.get(goal)
    accepted = (
        1 <= fixed.K <= len(free)
        and start_index == 1
        and goal_index == fixed.K
        and not (strict and duplicates)
    )

    if notes:
        logger.info(
            "Schedule %s reparado: %d duplicadas, %d em paredes, %d sem cobertura",
            schedule.task_id, len(duplicates), len(in_walls), len(uncovered),
        )

    return ValidationReport(
        uncovered=uncovered,
        duplicates=duplicates,
        in_walls=in_walls,
        start_index=start_index,
        goal_index=goal_index,
        accepted=accepted,
        schedule=fixed,
        notes=tuple(notes),
    )


def _cell_from_state(state) -> Cell:
    if len(state) >= 4:
        x, y = float(state[0]), float(state[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidStateError(f"Estado contínuo não finito: {state!r}")
        return math.floor(y), math.floor(x)
    return int(state[0]), int(state[1])


def progress_index(schedule: SubgoalSchedule, state) -> int:
    """k = h(s). Grid states are (row, col); maze states (x, y, vx, vy) are floored to their cell."""
    cell = _cell_from_state(state)
    try:
        return schedule.mapping[cell]
    except KeyError as exc:
        raise InvalidStateError(f"Estado {tuple(state)!r} fora do mapa de {schedule.task_id}") from exc


def render_schedule(schedule: SubgoalSchedule) -> str:
    """Same text shape the planner answers in, re-parseable by parse_response."""
    lines = ["{"]
    for k, subgoal in enumerate(schedule.subgoals, start=1):
        cells = ", ".join(f"({r},{c})" for r, c in subgoal.cells)
        separator = "," if k < schedule.K else ""
        lines.append(f"SubTask {k}: '{subgoal.name}', containing states: \"{cells}\"{separator}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def schedule_to_document(schedule: SubgoalSchedule) -> str:
    document = {
        "format": DOCUMENT_FORMAT,
        "version": DOCUMENT_VERSION,
        "task_id": schedule.task_id,
        "K": schedule.K,
        "digest": schedule.digest,
        "subgoals": [
            {"index": k, "name": sg.name, "cells": [list(cell) for cell in sg.cells]}
            for k, sg in enumerate(schedule.subgoals, start=1)
        ],
        "provenance": schedule.provenance.as_dict(),
    }
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def schedule_from_document(text: str) -> SubgoalSchedule:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleParseError(f"Documento de schedule inválido: {exc}") from exc
    if document.get("format") != DOCUMENT_FORMAT or document.get("version") != DOCUMENT_VERSION:
        raise ScheduleParseError("Formato ou versão de schedule não suportados")

    subgoals = [
        Subgoal(name=item["name"], cells=tuple((int(r), int(c)) for r, c in item["cells"]))
        for item in sorted(document["subgoals"], key=lambda item: item["index"])
    ]
    provenance = Provenance(**document["provenance"])
    schedule = SubgoalSchedule.from_subgoals(document["task_id"], subgoals, provenance)
    if schedule.K != document["K"]:
        raise ScheduleParseError(f"K={document['K']} não corresponde a {schedule.K} subtarefas")
    return schedule
