"""Mosaic Studio: compose multimodal AI model pipelines as typed piece graphs."""

from .catalog import Catalog, SearchHit, load_builtin
from .modality import Base, Modality, compatible
from .mosaic import (
    AddPiece,
    Chain,
    Connect,
    Disconnect,
    DuplicatePiece,
    Mosaic,
    MovePieces,
    RemovePiece,
    SetParameter,
    SnapCandidate,
    Violation,
)
from .pieces import Connection, ParameterSchema, PieceInstance, PieceKind, PieceSpec, Socket

__all__ = [
    "AddPiece",
    "Base",
    "Catalog",
    "Chain",
    "Connect",
    "Connection",
    "Disconnect",
    "DuplicatePiece",
    "Modality",
    "Mosaic",
    "MovePieces",
    "ParameterSchema",
    "PieceInstance",
    "PieceKind",
    "PieceSpec",
    "RemovePiece",
    "SearchHit",
    "SetParameter",
    "SnapCandidate",
    "Socket",
    "Violation",
    "compatible",
    "load_builtin",
]

__version__ = "0.1.0"
