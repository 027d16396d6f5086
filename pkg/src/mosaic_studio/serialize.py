"""One serialization path for everything the service and CLI emit.

Both surfaces must produce byte-identical JSON for the same operation, so
they all funnel through :func:`dumps` and the converters here.
"""

from __future__ import annotations

import json
from typing import Any

from .catalog import Catalog
from .mosaic import Mosaic, Violation
from .pieces import Connection, PieceInstance


def dumps(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def violations_to_json(violations: list[Violation]) -> dict[str, Any]:
    return {"violations": [v.to_json() for v in violations]}


def mosaic_to_json(mosaic: Mosaic) -> dict[str, Any]:
    """Graph state only; the edit journal is session-local and not persisted."""
    return {
        "pieces": [
            {
                "instance_id": piece.instance_id,
                "spec_id": piece.spec_id,
                "position": [piece.position[0], piece.position[1]],
                "parameters": piece.parameters,
            }
            for piece in mosaic.pieces.values()
        ],
        "connections": [
            {"from": c.from_instance, "to": c.to_instance, "channel": c.to_channel}
            for c in mosaic.connections
        ],
    }


def mosaic_from_json(catalog: Catalog, body: dict[str, Any]) -> tuple[Mosaic, list[str]]:
    """Rebuild a mosaic; unknown specs are kept and flagged, never dropped."""
    mosaic = Mosaic(catalog)
    flagged: list[str] = []
    highest = 0
    for raw in body.get("pieces", []):
        piece = PieceInstance(
            instance_id=raw["instance_id"],
            spec_id=raw["spec_id"],
            position=(float(raw["position"][0]), float(raw["position"][1])),
            parameters=dict(raw.get("parameters", {})),
        )
        mosaic._insert(piece)
        if catalog.get(piece.spec_id) is None:
            flagged.append(piece.instance_id)
        suffix = piece.instance_id[1:] if piece.instance_id.startswith("p") else ""
        if suffix.isdigit():
            highest = max(highest, int(suffix))
    mosaic._next_id = highest + 1
    for raw in body.get("connections", []):
        mosaic.connections.append(
            Connection(raw["from"], raw["to"], int(raw.get("channel", 0)))
        )
    return mosaic, flagged
