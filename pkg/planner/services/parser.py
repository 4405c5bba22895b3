"""
Parser das respostas do LLM no formato "SubTask n: '<nome>', containing states: ...".

Quotes may be ASCII or typographic. Lines beginning with '#' are ignored but
still counted, so error messages point at the original line. Range shorthand
such as "[3, 1..10]" is not expanded: only explicit "(r, c)" pairs count.
"""
from __future__ import annotations

import re

from core.exceptions import ScheduleParseError

from .schedule import Provenance, Subgoal, SubgoalSchedule

_QUOTES_OPEN = "'\"‘“"
_QUOTES_CLOSE = "'\"’”"

HEADER_RE = re.compile(
    rf"SubTask\s+(?P<number>\d+)\s*:\s*[{_QUOTES_OPEN}](?P<name>.*?)[{_QUOTES_CLOSE}]\s*,",
    re.IGNORECASE,
)
PAIR_RE = re.compile(r"\(([^()]*)\)")
INT_RE = re.compile(r"^\s*(-?\d+)\s*$")


def _strip_comments(text: str) -> list[tuple[int, str]]:
    """(line number, line) for every non-comment line, numbered from 1."""
    return [
        (number, line)
        for number, line in enumerate(text.splitlines(), start=1)
        if not line.lstrip().startswith("#")
    ]


def _parse_pair(token: str, line: int) -> tuple[int, int]:
    parts = token.split(",")
    if len(parts) != 2:
        raise ScheduleParseError("Par de coordenadas mal formado", line=line, token=f"({token})")
    values = []
    for part in parts:
        match = INT_RE.match(part)
        if not match:
            raise ScheduleParseError("Coordenada não inteira", line=line, token=f"({token})")
        values.append(int(match.group(1)))
    return values[0], values[1]


def parse_response(text: str, task_id: str = "", provenance: Provenance | None = None) -> SubgoalSchedule:
    if not text or not text.strip():
        raise ScheduleParseError("Resposta vazia")

    lines = _strip_comments(text)

    # Flatten keeping an offset -> line table so matches can be traced back.
    flat_parts: list[str] = []
    offsets: list[tuple[int, int]] = []
    position = 0
    for number, line in lines:
        offsets.append((position, number))
        flat_parts.append(line)
        position += len(line) + 1
    flat = "\n".join(flat_parts)

    def line_at(offset: int) -> int:
        current = offsets[0][1] if offsets else 1
        for start, number in offsets:
            if start > offset:
                break
            current = number
        return current

    headers = list(HEADER_RE.finditer(flat))
    if not headers:
        raise ScheduleParseError("Nenhuma entrada 'SubTask' encontrada")

    subgoals: list[Subgoal] = []
    for i, header in enumerate(headers):
        body_end = headers[i + 1].start() if i + 1 < len(headers) else len(flat)
        body = flat[header.end():body_end]
        cells: list[tuple[int, int]] = []
        for pair in PAIR_RE.finditer(body):
            line = line_at(header.end() + pair.start())
            cells.append(_parse_pair(pair.group(1), line))
        subgoals.append(Subgoal(name=header.group("name").strip(), cells=tuple(cells)))

    return SubgoalSchedule.from_subgoals(
        task_id,
        subgoals,
        provenance or Provenance("fixture", task_id or "inline"),
    )
