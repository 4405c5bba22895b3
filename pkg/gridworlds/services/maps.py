"""
Leitura de mapas em texto com o alfabeto {0, 1, r, g}.

One row per line; symbols may be separated by spaces or commas, or written
contiguously. Lines starting with '#' are comments.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from importlib import resources

WALL = "1"
PATH = "0"
START = "r"
GOAL = "g"
ALPHABET = frozenset({WALL, PATH, START, GOAL})


@dataclass(frozen=True)
class MapMatrix:
    rows: tuple[tuple[str, ...], ...]

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def symbol(self, row: int, col: int) -> str:
        return self.rows[row][col]

    def cells_with(self, *symbols: str) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r, line in enumerate(self.rows)
            for c, value in enumerate(line)
            if value in symbols
        ]

    @cached_property
    def walls(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.cells_with(WALL))

    @cached_property
    def start(self) -> tuple[int, int]:
        return self.cells_with(START)[0]

    @cached_property
    def goal(self) -> tuple[int, int]:
        return self.cells_with(GOAL)[0]


def load_map_text(text: str) -> MapMatrix:
    rows: list[tuple[str, ...]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        symbols = tuple(ch for ch in line if ch not in {" ", ",", "\t"})
        unknown = set(symbols) - ALPHABET
        if unknown:
            raise ValueError(f"Símbolos inválidos no mapa: {sorted(unknown)}")
        rows.append(symbols)

    if not rows:
        raise ValueError("Mapa vazio")
    if len({len(r) for r in rows}) != 1:
        raise ValueError("Mapa não é rectangular")

    matrix = MapMatrix(rows=tuple(rows))
    if len(matrix.cells_with(START)) != 1 or len(matrix.cells_with(GOAL)) != 1:
        raise ValueError("O mapa deve ter exactamente um 'r' e um 'g'")
    return matrix


def render_map_text(matrix: MapMatrix) -> str:
    return "\n".join(" ".join(row) for row in matrix.rows) + "\n"


def load_bundled_map(name: str) -> MapMatrix:
    text = resources.files("gridworlds").joinpath("maps", f"{name}.txt").read_text(encoding="utf-8")
    return load_map_text(text)
