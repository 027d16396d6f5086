"""The piece catalog: registry, semantic search, and modality grouping."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable

from . import builtin
from .errors import EmptyQuery
from .modality import Base
from .pieces import PieceKind, PieceSpec
from .scoring import LexicalProvider, SimilarityProvider

CATALOG_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SearchHit:
    spec_id: str
    score: float
    rank: int


class Catalog:
    """Immutable registry of piece specs plus a pluggable similarity scorer."""

    def __init__(
        self,
        specs: Iterable[PieceSpec],
        aliases: dict[str, str] | None = None,
        provider: SimilarityProvider | None = None,
    ):
        self.specs: dict[str, PieceSpec] = {}
        for spec in specs:
            if spec.spec_id in self.specs:
                raise ValueError(f"duplicate spec id {spec.spec_id!r}")
            self.specs[spec.spec_id] = spec
        self.aliases = dict(aliases or {})
        for alias, target in self.aliases.items():
            if alias in self.specs or target not in self.specs:
                raise ValueError(f"bad alias {alias!r} -> {target!r}")
        self.provider = provider or LexicalProvider()

    def __contains__(self, spec_id: str) -> bool:
        return self.resolve_id(spec_id) is not None

    def __len__(self) -> int:
        return len(self.specs)

    def resolve_id(self, spec_id: str) -> str | None:
        if spec_id in self.specs:
            return spec_id
        return self.aliases.get(spec_id)

    def get(self, spec_id: str) -> PieceSpec | None:
        resolved = self.resolve_id(spec_id)
        return self.specs.get(resolved) if resolved else None

    @property
    def model_specs(self) -> list[PieceSpec]:
        """The bundled model pieces, in table order (the glue piece is one of them)."""
        return [s for s in self.specs.values() if s.kind is not PieceKind.INPUT]

    @property
    def input_specs(self) -> list[PieceSpec]:
        return [s for s in self.specs.values() if s.kind is PieceKind.INPUT]

    def input_spec_for(self, base: Base) -> PieceSpec:
        for spec in self.input_specs:
            if spec.output_socket.modality.base is base:
                return spec
        raise KeyError(base)

    # -- search ------------------------------------------------------------

    def search(self, query: str, k: int = 10) -> list[SearchHit]:
        """Top-k specs by provider score over display name + description."""
        if not query.strip():
            raise EmptyQuery("search query is empty")
        if k < 1:
            raise ValueError("k must be >= 1")
        ids = list(self.specs)
        docs = [f"{self.specs[i].display_name} {self.specs[i].description}" for i in ids]
        scores = self.provider.scores(query, docs)
        ranked = sorted(zip(ids, scores), key=lambda pair: (-pair[1], pair[0]))
        return [
            SearchHit(spec_id, round(score, 6), rank)
            for rank, (spec_id, score) in enumerate(ranked[:k], start=1)
        ]

    # -- grouping ----------------------------------------------------------

    def group_by_input_modality(self) -> dict[Base, list[str]]:
        """Specs listed under the base modality of each input socket.

        Dual-input specs appear under both bases; input pieces are listed
        under the base they produce.
        """
        groups: dict[Base, list[str]] = {base: [] for base in Base}
        for spec in self.specs.values():
            if spec.kind is PieceKind.INPUT:
                bases = [spec.output_socket.modality.base]
            else:
                bases = []
                for sock in spec.input_sockets:
                    if sock.modality.base not in bases:
                        bases.append(sock.modality.base)
            for base in bases:
                groups[base].append(spec.spec_id)
        return groups

    # -- export ------------------------------------------------------------

    def to_document(self) -> dict:
        """Versioned JSON document for the UI and third-party tooling."""
        return {
            "format_version": CATALOG_FORMAT_VERSION,
            "fingerprint": self.fingerprint(),
            "aliases": dict(self.aliases),
            "specs": [spec_to_json(spec) for spec in self.specs.values()],
        }

    def fingerprint(self) -> str:
        payload = json.dumps(
            [spec_to_json(spec) for spec in self.specs.values()],
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def spec_to_json(spec: PieceSpec) -> dict:
    return {
        "spec_id": spec.spec_id,
        "display_name": spec.display_name,
        "kind": spec.kind.value,
        "model_name": spec.model_name,
        "inputs": [str(sock.modality) for sock in spec.input_sockets],
        "output": str(spec.output_socket.modality),
        "description": spec.description,
        "typical_runtime_seconds": spec.typical_runtime_seconds,
        "example_io": {
            "inputs": [
                {"modality": str(mod), "description": desc}
                for mod, desc in spec.example_io.inputs
            ],
            "output": {
                "modality": str(spec.example_io.output[0]),
                "description": spec.example_io.output[1],
            },
        },
        "parameters": [
            {
                "name": p.name,
                "kind": p.kind,
                "default": p.default,
                "tooltip": p.tooltip,
                **({"minimum": p.minimum, "maximum": p.maximum}
                   if p.minimum is not None else {}),
                **({"choices": list(p.choices)} if p.choices else {}),
            }
            for p in spec.parameters
        ],
    }


def load_builtin(provider: SimilarityProvider | None = None) -> Catalog:
    """The bundled catalog: 39 model pieces plus one input piece per modality."""
    return Catalog(builtin.build_specs(), aliases=builtin.ALIASES, provider=provider)
