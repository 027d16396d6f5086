"""Typed media payloads and the content-addressed blob store.

A MediaValue is what flows between pieces: a modality, a format tag, and
either inline text or the hash of a blob held in a store. Provenance records
who produced it and from what, which doubles as the cache key material.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .modality import Base, Modality

# Allowed payload format tags per base modality; the first is the default.
FORMAT_TAGS: dict[Base, tuple[str, ...]] = {
    Base.TEXT: ("txt",),
    Base.IMAGE: ("png", "jpg"),
    Base.VIDEO: ("mp4",),
    Base.THREE_D: ("glb",),
    Base.AUDIO: ("wav",),
    Base.SKETCH: ("png", "svg"),
}

MIME_TYPES = {
    "txt": "text/plain; charset=utf-8",
    "png": "image/png",
    "jpg": "image/jpeg",
    "mp4": "video/mp4",
    "glb": "model/gltf-binary",
    "wav": "audio/wav",
    "svg": "image/svg+xml",
}

USER_INPUT = "user-input"


def default_format(modality: Modality) -> str:
    return FORMAT_TAGS[modality.base][0]


def format_for_mime(content_type: str) -> str | None:
    bare = content_type.split(";")[0].strip().lower()
    for tag, mime in MIME_TYPES.items():
        if mime.split(";")[0] == bare:
            return tag
    return None


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def params_digest(parameters: dict[str, Any]) -> str:
    payload = json.dumps(parameters, sort_keys=True, separators=(",", ":"), default=str)
    return sha256_hex(payload.encode("utf-8"))[:16]


@dataclass(frozen=True)
class Provenance:
    """Where a value came from: producer id, parameter digest, input hashes."""

    producer: str = USER_INPUT
    params_hash: str = ""
    input_hashes: tuple[str, ...] = ()
    prompt: str | None = None  # glue pieces record the exact rendered prompt

    def to_json(self) -> dict[str, Any]:
        body: dict[str, Any] = {
            "producer": self.producer,
            "params_hash": self.params_hash,
            "input_hashes": list(self.input_hashes),
        }
        if self.prompt is not None:
            body["prompt"] = self.prompt
        return body

    @classmethod
    def from_json(cls, body: dict[str, Any]) -> "Provenance":
        return cls(
            producer=body.get("producer", USER_INPUT),
            params_hash=body.get("params_hash", ""),
            input_hashes=tuple(body.get("input_hashes", ())),
            prompt=body.get("prompt"),
        )


@dataclass(frozen=True)
class MediaValue:
    """One typed payload: inline text, or a blob reference by content hash."""

    modality: Modality
    format: str
    text: str | None = None
    blob_hash: str | None = None
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self) -> None:
        if self.format not in FORMAT_TAGS[self.modality.base]:
            raise ValueError(
                f"format {self.format!r} not valid for {self.modality.base.value}"
            )
        if (self.text is None) == (self.blob_hash is None):
            raise ValueError("exactly one of text or blob_hash must be set")

    @property
    def hash(self) -> str:
        if self.text is not None:
            return sha256_hex(self.text.encode("utf-8"))
        return self.blob_hash

    @classmethod
    def from_text(
        cls, text: str, provenance: Provenance | None = None, modality: Modality | None = None
    ) -> "MediaValue":
        return cls(
            modality=modality or Modality(Base.TEXT),
            format="txt",
            text=text,
            provenance=provenance or Provenance(),
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "modality": str(self.modality),
            "format": self.format,
            "hash": self.hash,
            "text": self.text,
            "provenance": self.provenance.to_json(),
        }

    @classmethod
    def from_json(cls, body: dict[str, Any]) -> "MediaValue":
        text = body.get("text")
        return cls(
            modality=Modality.parse(body["modality"]),
            format=body["format"],
            text=text,
            blob_hash=body["hash"] if text is None else None,
            provenance=Provenance.from_json(body.get("provenance", {})),
        )


class BlobStore:
    """Content-addressed byte store: one file per distinct payload.

    Files live at ``<root>/<hash>``; the format tag is remembered in a
    ``<hash>.tag`` sidecar so HTTP responses can carry a correct content
    type. Storing the same bytes twice yields the same single object.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def put(self, data: bytes, format: str) -> str:
        digest = sha256_hex(data)
        path = self.root / digest
        if not path.exists():
            path.write_bytes(data)
        tag = self.root / f"{digest}.tag"
        if not tag.exists():
            tag.write_text(format)
        return digest

    def get(self, digest: str) -> bytes:
        path = self.root / digest
        if not path.exists():
            raise KeyError(digest)
        return path.read_bytes()

    def format_of(self, digest: str) -> str:
        tag = self.root / f"{digest}.tag"
        if not tag.exists():
            raise KeyError(digest)
        return tag.read_text().strip()

    def exists(self, digest: str) -> bool:
        return (self.root / digest).exists()

    def put_value(
        self,
        data: bytes,
        modality: Modality,
        format: str | None = None,
        provenance: Provenance | None = None,
    ) -> MediaValue:
        fmt = format or default_format(modality)
        digest = self.put(data, fmt)
        return MediaValue(
            modality=modality,
            format=fmt,
            blob_hash=digest,
            provenance=provenance or Provenance(),
        )

    def bytes_of(self, value: MediaValue) -> bytes:
        if value.text is not None:
            return value.text.encode("utf-8")
        return self.get(value.blob_hash)
