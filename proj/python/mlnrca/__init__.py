"""Abductive root cause analysis over infrastructure models."""

from ._core import (
    Contradiction,
    Error,
    Model,
    ObservationConflict,
    ParseError,
    Session,
    pc_mutex_clause_count,
    parse_model,
)

__all__ = [
    "Contradiction",
    "Error",
    "Model",
    "ObservationConflict",
    "ParseError",
    "Session",
    "parse_model",
    "pc_mutex_clause_count",
]
