"""Language-model glue: the three bridging behaviors and their prompt templates.

Glue turns an LLM into a connector between pieces: *custom* applies a free
instruction to the incoming text, *translation* rewrites text into a prompt
suited to a text-to-x generator, and *ideation* brainstorms an idea for a
task. The templates are rendered byte-for-byte; golden tests pin them.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol, Union

import httpx

from .errors import ClientError, ClientTimeout, EmptyInput
from .media import MediaValue, Provenance
from .modality import Base

TRANSLATION_TEMPLATE = (
    "Here are example prompts for a text-to-{modality} generation model: {examples}.\n"
    "Transform {input} into a prompt. Answer in only the transformed prompt."
)
IDEATION_TEMPLATE = "Generate an idea for {task} based on {input}. Answer in one short sentence."

# How a base modality reads inside the translation template.
MODALITY_WORDS = {
    Base.TEXT: "text",
    Base.IMAGE: "image",
    Base.VIDEO: "video",
    Base.THREE_D: "3D",
    Base.AUDIO: "audio",
    Base.SKETCH: "sketch",
}


@dataclass(frozen=True)
class Custom:
    instruction: str

    def __post_init__(self) -> None:
        if not self.instruction.strip():
            raise ValueError("custom glue requires an instruction")


@dataclass(frozen=True)
class Translation:
    target: Base
    example_prompts: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.example_prompts:
            raise ValueError("translation glue requires example prompts")


@dataclass(frozen=True)
class Ideation:
    task: str

    def __post_init__(self) -> None:
        if not self.task.strip():
            raise ValueError("ideation glue requires a task")


GlueMode = Union[Custom, Translation, Ideation]


def default_translation_examples(target: Base) -> tuple[str, ...]:
    """The curated example prompts bundled for each target modality."""
    data = json.loads(
        resources.files("mosaic_studio").joinpath("data/translation_examples.json").read_text()
    )
    return tuple(data[target.value])


def render_prompt(mode: GlueMode, input_data: str) -> str:
    if not input_data:
        raise EmptyInput("glue received empty input")
    if isinstance(mode, Custom):
        return f"{mode.instruction}\n{input_data}"
    if isinstance(mode, Translation):
        return TRANSLATION_TEMPLATE.format(
            modality=MODALITY_WORDS[mode.target],
            examples="; ".join(mode.example_prompts),
            input=input_data,
        )
    if isinstance(mode, Ideation):
        return IDEATION_TEMPLATE.format(task=mode.task, input=input_data)
    raise TypeError(f"not a glue mode: {mode!r}")


@dataclass(frozen=True)
class ClientConfig:
    timeout_seconds: float = 60.0
    retries: int = 1


class CompletionClient(Protocol):
    def complete(self, prompt: str) -> str: ...


class EchoClient:
    """Stub that returns the prompt itself; handy for wiring tests."""

    def complete(self, prompt: str) -> str:
        return prompt


class CannedClient:
    """Deterministic offline completion: a stable digest of the prompt."""

    def complete(self, prompt: str) -> str:
        from .media import sha256_hex

        return f"completion {sha256_hex(prompt.encode('utf-8'))[:12]}"


class ScriptedClient:
    """Replays an ordered transcript of (expected-prompt-substring, response).

    Each call consumes the next pair after checking the expectation, so a
    test can script an exact multi-round conversation.
    """

    def __init__(self, transcript: list[tuple[str, str]]):
        self.transcript = list(transcript)
        self.cursor = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedClient":
        entries = json.loads(Path(path).read_text())
        return cls([(e["expect"], e["response"]) for e in entries])

    def complete(self, prompt: str) -> str:
        if self.cursor >= len(self.transcript):
            raise ClientError("transcript exhausted", prompt=prompt)
        expect, response = self.transcript[self.cursor]
        self.cursor += 1
        if expect and expect not in prompt:
            raise ClientError(f"prompt does not contain {expect!r}", prompt=prompt)
        return response


@dataclass
class HttpCompletionClient:
    """POSTs {"prompt": ...} to a completion endpoint, expecting {"completion": ...}."""

    endpoint: str
    api_key: str | None = None
    config: ClientConfig = field(default_factory=ClientConfig)
    transport: httpx.BaseTransport | None = None  # injectable for tests

    def complete(self, prompt: str) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        attempts = self.config.retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            try:
                with httpx.Client(
                    timeout=self.config.timeout_seconds, transport=self.transport
                ) as client:
                    response = client.post(
                        self.endpoint, json={"prompt": prompt}, headers=headers
                    )
                response.raise_for_status()
                return response.json()["completion"]
            except httpx.TimeoutException as exc:
                last_error = exc
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
                if attempt + 1 < attempts:
                    time.sleep(0.05)
        if isinstance(last_error, httpx.TimeoutException):
            raise ClientTimeout(str(last_error), prompt=prompt)
        raise ClientError(str(last_error), prompt=prompt)


def run_glue(mode: GlueMode, input_data: str, client: CompletionClient) -> MediaValue:
    """Render the mode's prompt, complete it, and wrap the result as text.

    The exact prompt is recorded in the value's provenance. Client failures
    propagate as ClientError/ClientTimeout carrying the prompt.
    """
    prompt = render_prompt(mode, input_data)
    try:
        completion = client.complete(prompt)
    except ClientError:
        raise
    except Exception as exc:  # normalize foreign client exceptions
        raise ClientError(str(exc), prompt=prompt) from exc
    return MediaValue.from_text(completion, provenance=Provenance(prompt=prompt))
