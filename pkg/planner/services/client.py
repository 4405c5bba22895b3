"""
Cliente do endpoint LLM (API estilo chat-completions) e modo offline por fixtures.

Live calls are single-turn, temperature 0 by default. Transient failures
(connection errors, timeouts, 429 and 5xx) are retried with linear backoff;
authentication failures are not.
"""
from __future__ import annotations

import logging
import os
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import UTC, datetime

import requests
from django.conf import settings

from core.exceptions import (
    ConfigError,
    EmptyCompletionError,
    PlannerAuthError,
    PlannerTransportError,
    ScheduleParseError,
)

from .fixtures import default_fixture_for, load_fixture
from .parser import parse_response
from .prompts import PromptRequest
from .schedule import Provenance, Subgoal

logger = logging.getLogger(__name__)

LIVE = "live"
FIXTURE = "fixture"
_TRANSIENT_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class EndpointConfig:
    mode: str = FIXTURE
    base_url: str = ""
    model: str = ""
    api_key_env: str = "STORL_LLM_API_KEY"
    retries: int = 3
    timeout: float = 60.0
    temperature: float = 0.0
    backoff: float = 1.0
    fixture: str | None = None

    def __post_init__(self):
        if self.mode not in (LIVE, FIXTURE):
            raise ConfigError(f"planner.mode inválido: {self.mode!r}")
        if self.retries < 0:
            raise ConfigError("planner.retries não pode ser negativo")
        if self.mode == LIVE and (not self.base_url or not self.model):
            raise ConfigError("Modo live requer planner.base_url e planner.model")

    @classmethod
    def from_settings(cls, **overrides) -> EndpointConfig:
        values = {
            "mode": settings.STORL_PLANNER_MODE,
            "base_url": settings.STORL_LLM_BASE_URL,
            "model": settings.STORL_LLM_MODEL,
            "api_key_env": settings.STORL_LLM_API_KEY_ENV,
            "retries": settings.STORL_LLM_RETRIES,
            "timeout": settings.STORL_LLM_TIMEOUT,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def credential(self) -> str:
        key = os.getenv(self.api_key_env, "")
        if not key:
            raise ConfigError(f"Credencial em falta: defina a variável {self.api_key_env}")
        return key


@dataclass(frozen=True)
class PlannerResponse:
    raw_text: str
    provenance: Provenance
    parse_status: str = "unparsed"
    subtasks: tuple[Subgoal, ...] = field(default=())
    error: str | None = None

    def parsed(self, task_id: str) -> PlannerResponse:
        try:
            schedule = parse_response(self.raw_text, task_id, self.provenance)
        except ScheduleParseError as exc:
            return PlannerResponse(self.raw_text, self.provenance, "error", (), str(exc))
        return PlannerResponse(self.raw_text, self.provenance, "ok", schedule.subgoals)


class PlannerClient:
    """Obtém o texto de planeamento para um PromptRequest."""

    def __init__(
        self,
        config: EndpointConfig,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.session = session or requests.Session()
        self.sleep = sleep

    def fetch(self, request: PromptRequest) -> PlannerResponse:
        if self.config.mode == FIXTURE:
            name = self.config.fixture or default_fixture_for(request.task_id)
            return PlannerResponse(load_fixture(name), Provenance(FIXTURE, name)).parsed(request.task_id)

        text = self._complete(request.text)
        provenance = Provenance(LIVE, self.config.model, datetime.now(UTC).isoformat())
        return PlannerResponse(text, provenance).parsed(request.task_id)

    def _complete(self, prompt: str) -> str:
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        headers = {"Authorization": f"Bearer {self.config.credential()}"}
        payload = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }

        attempts = self.config.retries + 1
        last_error = ""
        for attempt in range(1, attempts + 1):
            try:
                response = self.session.post(url, json=payload, headers=headers, timeout=self.config.timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_error = str(exc)
            else:
                if response.status_code in (401, 403):
                    raise PlannerAuthError(f"Endpoint recusou a credencial (HTTP {response.status_code})")
                if response.status_code in _TRANSIENT_STATUS:
                    last_error = f"HTTP {response.status_code}"
                elif response.status_code >= 400:
                    raise PlannerTransportError(f"Pedido rejeitado: HTTP {response.status_code}")
                else:
                    return self._extract_content(response)

            if attempt < attempts:
                logger.warning(f"Falha transitória no planner ({last_error}); tentativa {attempt}/{attempts}")
                self.sleep(self.config.backoff * attempt)

        raise PlannerTransportError(f"Endpoint indisponível após {attempts} tentativas: {last_error}")

    @staticmethod
    def _extract_content(response: requests.Response) -> str:
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise EmptyCompletionError("Resposta sem conteúdo de completion") from exc
        if not content or not str(content).strip():
            raise EmptyCompletionError("Completion vazia")
        return str(content)


def fetch_plan(request: PromptRequest, config: EndpointConfig, **client_kwargs) -> PlannerResponse:
    return PlannerClient(config, **client_kwargs).fetch(request)
