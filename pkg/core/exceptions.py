"""
Hierarquia de erros do STO-RL lab.

Library code raises these; only the management command turns them into exit codes
(ConfigError -> 1, everything else -> 2).
"""
from __future__ import annotations

from django.core.exceptions import ValidationError


class StorlError(Exception):
    """Base class for runtime failures in the pipeline."""


class ConfigError(ValidationError):
    """Invalid run configuration or missing input artifact."""


# env
class InvalidStateError(StorlError):
    pass


class InvalidActionError(StorlError):
    pass


class UnknownTaskError(StorlError, ValueError):
    pass


# planner
class PlannerError(StorlError):
    pass


class PlannerTransportError(PlannerError):
    pass


class PlannerAuthError(PlannerError):
    pass


class EmptyCompletionError(PlannerError):
    pass


class ScheduleParseError(PlannerError):
    def __init__(self, message: str, line: int | None = None, token: str | None = None):
        self.line = line
        self.token = token
        if line is not None:
            message = f"{message} (line {line}, token {token!r})"
        super().__init__(message)


class ScheduleRejectedError(PlannerError):
    pass


# shaping
class ShapingError(StorlError, ValueError):
    pass


class UnmappableStateError(ShapingError):
    def __init__(self, trajectory_id: int, index: int, state):
        self.trajectory_id = trajectory_id
        self.index = index
        self.state = state
        super().__init__(
            f"State {state!r} at trajectory {trajectory_id}, index {index} has no progress index"
        )


class PreconditionError(ShapingError):
    pass


class DefinitionViolationError(ShapingError):
    pass


# learner
class ShapeMismatchError(StorlError, ValueError):
    pass


class EmptyBatchError(StorlError, ValueError):
    pass


class DivergenceError(StorlError):
    pass


class CheckpointFormatError(StorlError, ValueError):
    pass


# harness
class EmptyReportError(StorlError, ValueError):
    pass


class EmptySeriesError(StorlError, ValueError):
    pass


class DatasetFormatError(StorlError, ValueError):
    pass


class ArtifactIOError(StorlError):
    """An artifact could not be read or written (permissions, encoding, path is a directory)."""
