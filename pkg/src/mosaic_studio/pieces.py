"""Piece specifications: the typed description of one catalog entry.

A spec declares what a piece consumes and produces (sockets), its
user-tunable parameters with defaults and hard limits, and the metadata
shown in catalog tooltips.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .modality import Modality


class PieceKind(str, Enum):
    INPUT = "input"
    MODEL = "model"
    GLUE = "glue"


@dataclass(frozen=True)
class Socket:
    """One input or output arm of a piece."""

    modality: Modality
    channel: int = 0

    def __post_init__(self) -> None:
        if self.channel < 0:
            raise ValueError("channel must be non-negative")


@dataclass(frozen=True)
class ParameterSchema:
    """A single tunable parameter: kind, default, limits, and a plain-language tooltip.

    ``minimum``/``maximum`` are required for integer and real kinds so the UI
    can clamp experimentation to safe values; ``choices`` is required for
    enums.
    """

    name: str
    kind: str  # integer | real | enum | boolean | text
    default: Any
    tooltip: str
    minimum: float | None = None
    maximum: float | None = None
    choices: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind in ("integer", "real") and (self.minimum is None or self.maximum is None):
            raise ValueError(f"parameter {self.name!r}: {self.kind} kind requires bounds")
        if self.kind == "enum" and not self.choices:
            raise ValueError(f"parameter {self.name!r}: enum kind requires choices")
        problem = self.check(self.default)
        if problem is not None:
            raise ValueError(f"parameter {self.name!r}: default {problem}")

    def check(self, value: Any) -> str | None:
        """Return a description of why ``value`` is unacceptable, or None."""
        if self.kind == "integer":
            if isinstance(value, bool) or not isinstance(value, int):
                return f"{value!r} is not an integer"
            if not (self.minimum <= value <= self.maximum):
                return f"{value!r} outside [{self.minimum}, {self.maximum}]"
        elif self.kind == "real":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return f"{value!r} is not a number"
            if not (self.minimum <= value <= self.maximum):
                return f"{value!r} outside [{self.minimum}, {self.maximum}]"
        elif self.kind == "enum":
            if value not in self.choices:
                return f"{value!r} not one of {list(self.choices)}"
        elif self.kind == "boolean":
            if not isinstance(value, bool):
                return f"{value!r} is not a boolean"
        elif self.kind == "text":
            if not isinstance(value, str):
                return f"{value!r} is not text"
        else:
            return f"unknown parameter kind {self.kind!r}"
        return None


@dataclass(frozen=True)
class ExampleIO:
    """Illustrative input/output pair, typed so it can be checked against sockets."""

    inputs: tuple[tuple[Modality, str], ...]
    output: tuple[Modality, str]


@dataclass(frozen=True)
class PieceSpec:
    """Typed description of one catalog entry."""

    spec_id: str
    display_name: str
    kind: PieceKind
    input_sockets: tuple[Socket, ...]
    output_socket: Socket
    description: str
    typical_runtime_seconds: float
    example_io: ExampleIO
    parameters: tuple[ParameterSchema, ...] = ()
    model_name: str = ""

    def __post_init__(self) -> None:
        if self.kind is PieceKind.INPUT:
            if self.input_sockets:
                raise ValueError(f"{self.spec_id}: input pieces take no inputs")
        elif len(self.input_sockets) not in (1, 2):
            raise ValueError(f"{self.spec_id}: model/glue pieces take 1 or 2 inputs")
        for i, sock in enumerate(self.input_sockets):
            if sock.channel != i:
                raise ValueError(f"{self.spec_id}: input socket {i} has channel {sock.channel}")
        if self.output_socket.channel != 0:
            raise ValueError(f"{self.spec_id}: output channel must be 0")
        if self.typical_runtime_seconds <= 0:
            raise ValueError(f"{self.spec_id}: runtime must be positive")

    @property
    def arity(self) -> int:
        return len(self.input_sockets)

    def parameter(self, name: str) -> ParameterSchema | None:
        for schema in self.parameters:
            if schema.name == name:
                return schema
        return None

    def default_parameters(self) -> dict[str, Any]:
        return {schema.name: schema.default for schema in self.parameters}

    def check_parameters(self, values: dict[str, Any]) -> list[tuple[str, str]]:
        """(name, problem) pairs for a full or partial parameter assignment."""
        problems = []
        for name, value in values.items():
            schema = self.parameter(name)
            if schema is None:
                problems.append((name, f"unknown parameter {name!r}"))
                continue
            problem = schema.check(value)
            if problem is not None:
                problems.append((name, f"parameter {name!r}: {problem}"))
        return problems


@dataclass
class PieceInstance:
    """A placed piece on the canvas: spec reference, position, parameter values."""

    instance_id: str
    spec_id: str
    position: tuple[float, float]
    parameters: dict[str, Any] = field(default_factory=dict)

    def clone(self, instance_id: str, position: tuple[float, float]) -> "PieceInstance":
        return PieceInstance(instance_id, self.spec_id, position, dict(self.parameters))


@dataclass(frozen=True)
class Connection:
    """A directed wire from a piece's output into one input channel of another."""

    from_instance: str
    to_instance: str
    to_channel: int
