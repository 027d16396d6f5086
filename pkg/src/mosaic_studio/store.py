"""Workspace persistence: mosaic documents, run records, blobs, cache.

Layout under the workspace directory:

    mosaics/<document_id>.json
    blobs/<content-hash>            (+ <content-hash>.tag sidecar)
    runs/<run_id>.json
    cache/<key>.json

Documents carry an optimistic version counter; saving with a stale version
is refused rather than silently overwriting.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .catalog import Catalog
from .engine import OutputCache, RunRecord
from .errors import CorruptDocument, InvalidMosaic, NotFound, VersionConflict, VersionTooNew
from .media import BlobStore
from .mosaic import Mosaic
from .serialize import mosaic_from_json, mosaic_to_json

DOCUMENT_FORMAT_VERSION = 1


@dataclass
class MosaicDocument:
    document_id: str
    title: str
    version: int
    catalog_fingerprint: str
    created_at: float
    modified_at: float
    mosaic: dict[str, Any]
    flagged_instances: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "format_version": DOCUMENT_FORMAT_VERSION,
            "id": self.document_id,
            "title": self.title,
            "version": self.version,
            "catalog_fingerprint": self.catalog_fingerprint,
            "created_at": self.created_at,
            "modified_at": self.modified_at,
            "mosaic": self.mosaic,
        }


class WorkspaceStore:
    def __init__(self, root: str | Path, catalog: Catalog):
        self.root = Path(root)
        self.catalog = catalog
        self.mosaic_dir = self.root / "mosaics"
        self.run_dir = self.root / "runs"
        self.mosaic_dir.mkdir(parents=True, exist_ok=True)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.blobs = BlobStore(self.root / "blobs")
        self.cache = OutputCache(self.root / "cache")

    # -- mosaic documents ----------------------------------------------------

    def save_mosaic(
        self,
        mosaic: Mosaic,
        title: str = "Untitled mosaic",
        document_id: str | None = None,
        expected_version: int | None = None,
        allow_flagged: bool = False,
    ) -> MosaicDocument:
        """Persist graph state; returns the stored document.

        A mosaic must validate cleanly to be saved. ``allow_flagged`` admits
        unknown-spec violations so a document loaded under a mismatched
        catalog can still be round-tripped.
        """
        violations = mosaic.validate()
        if not allow_flagged:
            blocking = violations
        else:
            blocking = [v for v in violations if v.code != "unknown_spec"]
        if blocking:
            raise InvalidMosaic(blocking)
        now = time.time()
        if document_id is None:
            document = MosaicDocument(
                document_id=uuid.uuid4().hex[:12],
                title=title,
                version=1,
                catalog_fingerprint=self.catalog.fingerprint(),
                created_at=now,
                modified_at=now,
                mosaic=mosaic_to_json(mosaic),
            )
        else:
            current = self.load_document(document_id)
            if expected_version is not None and current.version != expected_version:
                raise VersionConflict(
                    f"document at version {current.version}, expected {expected_version}"
                )
            document = MosaicDocument(
                document_id=document_id,
                title=title or current.title,
                version=current.version + 1,
                catalog_fingerprint=self.catalog.fingerprint(),
                created_at=current.created_at,
                modified_at=now,
                mosaic=mosaic_to_json(mosaic),
            )
        path = self.mosaic_dir / f"{document.document_id}.json"
        path.write_text(json.dumps(document.to_json(), indent=2))
        return document

    def load_document(self, document_id: str) -> MosaicDocument:
        path = self.mosaic_dir / f"{document_id}.json"
        if not path.exists():
            raise NotFound(document_id)
        try:
            body = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CorruptDocument(str(exc)) from exc
        if not isinstance(body, dict) or "mosaic" not in body:
            raise CorruptDocument(f"{document_id}: missing mosaic section")
        if body.get("format_version", 0) > DOCUMENT_FORMAT_VERSION:
            raise VersionTooNew(str(body.get("format_version")))
        return MosaicDocument(
            document_id=body.get("id", document_id),
            title=body.get("title", "Untitled mosaic"),
            version=int(body.get("version", 1)),
            catalog_fingerprint=body.get("catalog_fingerprint", ""),
            created_at=float(body.get("created_at", 0.0)),
            modified_at=float(body.get("modified_at", 0.0)),
            mosaic=body["mosaic"],
        )

    def load_mosaic(self, document_id: str) -> tuple[Mosaic, MosaicDocument]:
        """Rebuild the mosaic; unknown specs are flagged on the document."""
        document = self.load_document(document_id)
        mosaic, flagged = mosaic_from_json(self.catalog, document.mosaic)
        document.flagged_instances = flagged
        return mosaic, document

    def list_documents(self) -> list[MosaicDocument]:
        documents = []
        for path in sorted(self.mosaic_dir.glob("*.json")):
            documents.append(self.load_document(path.stem))
        return documents

    # -- run records -----------------------------------------------------------

    def save_run(self, record: RunRecord) -> None:
        path = self.run_dir / f"{record.run_id}.json"
        path.write_text(json.dumps(record.to_json(), indent=2))

    def load_run_json(self, run_id: str) -> dict[str, Any]:
        path = self.run_dir / f"{run_id}.json"
        if not path.exists():
            raise NotFound(run_id)
        return json.loads(path.read_text())
