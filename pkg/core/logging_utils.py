"""
Logging estruturado: uma linha JSON por registo, marcada com a execução corrente.

The management command opens a `run_scope` per invocation; every record logged
inside it carries the run id and the subcommand name, so the lines of one
`storl train` can be grepped out of a shared log.
"""
import contextvars
import json
import logging
from contextlib import contextmanager
from datetime import UTC, datetime
from typing import NamedTuple


class RunContext(NamedTuple):
    run_id: str = "-"
    command: str = ""


_RUN_CTX = contextvars.ContextVar("storl_run", default=RunContext())

# LogRecord attributes that are not user extras
_RESERVED = set(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {"message", "asctime", "run_id", "command"}


def get_run() -> RunContext:
    return _RUN_CTX.get()


@contextmanager
def run_scope(run_id: str, command: str = ""):
    token = _RUN_CTX.set(RunContext(run_id, command))
    try:
        yield
    finally:
        _RUN_CTX.reset(token)


class RunIdFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        run = get_run()
        record.run_id = run.run_id
        record.command = run.command
        return True


class JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "timestamp": datetime.fromtimestamp(record.created, tz=UTC).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "line": record.lineno,
        }

        run_id = getattr(record, "run_id", "-")
        if run_id and run_id != "-":
            payload["run_id"] = run_id
            payload["command"] = getattr(record, "command", "")

        # logger.info(..., extra={"step": 10}) lands in the payload as-is
        for key, value in vars(record).items():
            if key not in _RESERVED and not key.startswith("_"):
                payload[key] = value

        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)

        return json.dumps(payload, ensure_ascii=True, default=str)
