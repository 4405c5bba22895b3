"""Respostas LLM gravadas, usadas no modo offline e nos testes."""
from __future__ import annotations

from importlib import resources

from core.exceptions import UnknownTaskError
from gridworlds.services.tasks import CLIFFWALKING, FOURROOM, MEDIUM, UMAZE

FIXTURES = {
    "cliffwalking": CLIFFWALKING,
    "fourroom": FOURROOM,
    "umaze": UMAZE,
    "medium": MEDIUM,
    "medium_flawed_1": MEDIUM,
    "medium_flawed_2": MEDIUM,
}

DEFAULT_FIXTURE = {
    CLIFFWALKING: "cliffwalking",
    FOURROOM: "fourroom",
    UMAZE: "umaze",
    MEDIUM: "medium",
}


def fixture_task(name: str) -> str:
    try:
        return FIXTURES[name]
    except KeyError as exc:
        raise UnknownTaskError(f"Fixture desconhecida: {name!r}") from exc


def load_fixture(name: str) -> str:
    fixture_task(name)
    return resources.files("planner").joinpath("fixtures", f"{name}.txt").read_text(encoding="utf-8")


def default_fixture_for(task_id: str) -> str:
    try:
        return DEFAULT_FIXTURE[task_id]
    except KeyError as exc:
        raise UnknownTaskError(f"Tarefa desconhecida: {task_id!r}") from exc
