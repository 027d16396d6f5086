"""Media modalities and the compatibility rule that governs piece connections.

A modality is a base media kind plus an optional refinement tag. Refinements
exist only for image (structural guide maps) and audio (content categories);
both tag sets are closed. Compatibility is directional: a refined output may
feed a plain input of the same base, but a refined input accepts only the
exact same refinement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class Base(str, Enum):
    """The six base media kinds a socket or payload can carry."""

    TEXT = "text"
    IMAGE = "image"
    VIDEO = "video"
    THREE_D = "3d"
    AUDIO = "audio"
    SKETCH = "sketch"


IMAGE_REFINEMENTS = frozenset({"pose", "segmentation", "depth", "normal", "edge"})
AUDIO_REFINEMENTS = frozenset({"sound_effects", "music", "speech"})

REFINEMENTS: dict[Base, frozenset[str]] = {
    Base.IMAGE: IMAGE_REFINEMENTS,
    Base.AUDIO: AUDIO_REFINEMENTS,
}

_MODALITY_RE = re.compile(r"^([a-z0-9_]+)(?:\(([a-z_]+)\))?$")


@dataclass(frozen=True)
class Modality:
    """A base media kind with an optional refinement tag, e.g. image(depth)."""

    base: Base
    refinement: str | None = None

    def __post_init__(self) -> None:
        allowed = REFINEMENTS.get(self.base, frozenset())
        if self.refinement is not None and self.refinement not in allowed:
            raise ValueError(
                f"{self.base.value!r} does not admit refinement {self.refinement!r}"
            )

    def __str__(self) -> str:
        if self.refinement is None:
            return self.base.value
        return f"{self.base.value}({self.refinement})"

    @classmethod
    def parse(cls, text: str) -> "Modality":
        m = _MODALITY_RE.match(text.strip().lower())
        if m is None:
            raise ValueError(f"malformed modality: {text!r}")
        base_token, refinement = m.groups()
        try:
            base = Base(base_token)
        except ValueError:
            raise ValueError(f"unknown base modality: {base_token!r}") from None
        return cls(base, refinement)


TEXT = Modality(Base.TEXT)
IMAGE = Modality(Base.IMAGE)
VIDEO = Modality(Base.VIDEO)
THREE_D = Modality(Base.THREE_D)
AUDIO = Modality(Base.AUDIO)
SKETCH = Modality(Base.SKETCH)


def compatible(out: Modality, into: Modality) -> bool:
    """Whether an output of modality ``out`` may feed an input of ``into``.

    Bases must match. A plain input accepts any refinement of its base; a
    refined input accepts only the identical refinement (so a plain image
    never satisfies an image(depth) input).
    """
    if out.base is not into.base:
        return False
    if into.refinement is None:
        return True
    return out.refinement == into.refinement
