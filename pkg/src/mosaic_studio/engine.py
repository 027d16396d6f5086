"""Chain execution: the adapter registry, run records, and the output cache.

Chains run piece by piece in topological order. Every piece's output is
memoized by (spec id, parameter digest, input hashes), so re-running an
unchanged prefix costs nothing; a failure marks everything downstream of it
skipped but preserves the record. Records support one writer and many
readers: status transitions are monotonic and guarded by a lock.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Protocol

import httpx

from .catalog import Catalog
from .errors import (
    AdapterFailure,
    InvalidMosaic,
    MissingInput,
    NotReachable,
    NotYetComputed,
    PieceFailed,
    UnknownSpec,
)
from .glue import (
    CannedClient,
    CompletionClient,
    Custom,
    GlueMode,
    Ideation,
    Translation,
    default_translation_examples,
    run_glue,
)
from .media import (
    BlobStore,
    MediaValue,
    Provenance,
    default_format,
    params_digest,
    sha256_hex,
)
from .mockmedia import make_blob
from .modality import Base, Modality
from .mosaic import Chain, Mosaic
from .pieces import PieceKind, PieceSpec

DEFAULT_PIECE_TIMEOUT = 120.0


class Adapter(Protocol):
    """Executes one spec: inputs in channel order plus parameter values."""

    serves: str
    deterministic: bool

    def execute(
        self, inputs: list[MediaValue], params: dict[str, Any], context: "RunContext"
    ) -> MediaValue: ...


@dataclass
class RunContext:
    """What an adapter may touch while executing."""

    blobs: BlobStore
    instance_id: str
    params_hash: str
    input_hashes: tuple[str, ...]

    def provenance(self, prompt: str | None = None) -> Provenance:
        return Provenance(
            producer=self.instance_id,
            params_hash=self.params_hash,
            input_hashes=self.input_hashes,
            prompt=prompt,
        )


class MockAdapter:
    """Deterministic stand-in for a real model: stamped placeholder output."""

    def __init__(self, spec: PieceSpec):
        self.spec = spec
        self.serves = spec.spec_id
        self.deterministic = True

    def execute(
        self, inputs: list[MediaValue], params: dict[str, Any], context: RunContext
    ) -> MediaValue:
        stamp = f"{self.serves}:{context.params_hash}:{' '.join(context.input_hashes)}"
        out_modality = self.spec.output_socket.modality
        if out_modality.base is Base.TEXT:
            text = f"[{self.serves}] mock output {sha256_hex(stamp.encode())[:12]}"
            return MediaValue.from_text(text, provenance=context.provenance())
        fmt = default_format(out_modality)
        return context.blobs.put_value(
            make_blob(fmt, stamp), out_modality, fmt, context.provenance()
        )


class GlueAdapter:
    """Runs the language-model glue piece against a completion client."""

    def __init__(self, client: CompletionClient | None = None, deterministic: bool = True):
        self.serves = "ask_gpt"
        self.client = client or CannedClient()
        self.deterministic = deterministic

    def execute(
        self, inputs: list[MediaValue], params: dict[str, Any], context: RunContext
    ) -> MediaValue:
        if inputs[0].text is None:
            raise AdapterFailure(context.instance_id, "glue input is not text")
        mode = glue_mode_from_params(params)
        value = run_glue(mode, inputs[0].text, self.client)
        return MediaValue.from_text(
            value.text, provenance=context.provenance(prompt=value.provenance.prompt)
        )


def glue_mode_from_params(params: dict[str, Any]) -> GlueMode:
    mode = params.get("mode", "custom")
    if mode == "ideation":
        return Ideation(params.get("task") or "an idea")
    if mode == "translation":
        target = Base(params.get("target_modality", "image"))
        override = (params.get("example_prompts") or "").strip()
        examples = (
            tuple(line.strip() for line in override.splitlines() if line.strip())
            if override
            else default_translation_examples(target)
        )
        return Translation(target, examples)
    return Custom(params.get("instruction") or "Respond to the following input.")


@dataclass
class HttpAdapter:
    """Calls a remote inference endpoint with JSON + base64 blob bodies."""

    serves: str
    spec: PieceSpec
    url: str
    auth_header: str | None = None
    auth_value: str | None = None
    timeout: float = DEFAULT_PIECE_TIMEOUT
    deterministic: bool = False
    transport: httpx.BaseTransport | None = None

    def execute(
        self, inputs: list[MediaValue], params: dict[str, Any], context: RunContext
    ) -> MediaValue:
        import base64

        body = {
            "spec": self.serves,
            "parameters": params,
            "inputs": [
                {
                    "modality": str(value.modality),
                    "format": value.format,
                    **(
                        {"text": value.text}
                        if value.text is not None
                        else {"data_b64": base64.b64encode(context.blobs.bytes_of(value)).decode()}
                    ),
                }
                for value in inputs
            ],
        }
        headers = {}
        if self.auth_header and self.auth_value:
            headers[self.auth_header] = self.auth_value
        with httpx.Client(timeout=self.timeout, transport=self.transport) as client:
            response = client.post(self.url, json=body, headers=headers)
        response.raise_for_status()
        payload = response.json()
        modality = Modality.parse(payload["modality"])
        if "text" in payload and payload["text"] is not None:
            return MediaValue.from_text(
                payload["text"], provenance=context.provenance(), modality=modality
            )
        data = base64.b64decode(payload["data_b64"])
        return context.blobs.put_value(
            data, modality, payload.get("format"), context.provenance()
        )


class AdapterRegistry:
    """Maps spec ids to adapters; total because mocks back every spec."""

    def __init__(self, catalog: Catalog, glue_client: CompletionClient | None = None):
        self.catalog = catalog
        self._adapters: dict[str, Adapter] = {}
        self._glue_client = glue_client

    def register(self, adapter: Adapter) -> None:
        if self.catalog.get(adapter.serves) is None:
            raise UnknownSpec(adapter.serves)
        self._adapters[adapter.serves] = adapter

    def get(self, spec_id: str) -> Adapter:
        spec = self.catalog.get(spec_id)
        if spec is None:
            raise UnknownSpec(spec_id)
        adapter = self._adapters.get(spec.spec_id)
        if adapter is not None:
            return adapter
        if spec.kind is PieceKind.GLUE:
            return GlueAdapter(self._glue_client)
        return MockAdapter(spec)

    @classmethod
    def from_config_file(cls, catalog: Catalog, path: str | Path) -> "AdapterRegistry":
        """Registry with HTTP adapters per the endpoint config file."""
        import os

        registry = cls(catalog)
        config = json.loads(Path(path).read_text())
        for spec_id, entry in config.items():
            spec = catalog.get(spec_id)
            if spec is None:
                raise UnknownSpec(spec_id)
            auth_value = None
            if entry.get("auth_env"):
                auth_value = os.environ.get(entry["auth_env"])
            registry.register(
                HttpAdapter(
                    serves=spec.spec_id,
                    spec=spec,
                    url=entry["url"],
                    auth_header=entry.get("auth_header"),
                    auth_value=auth_value,
                    timeout=float(entry.get("timeout", DEFAULT_PIECE_TIMEOUT)),
                )
            )
        return registry


class OutputCache:
    """Content-addressed memo of piece outputs, optionally persisted."""

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)
        self._memory: dict[str, MediaValue] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key(spec_id: str, params_hash: str, input_hashes: tuple[str, ...]) -> str:
        material = json.dumps([spec_id, params_hash, list(input_hashes)])
        return sha256_hex(material.encode("utf-8"))

    def get(self, key: str) -> MediaValue | None:
        with self._lock:
            if key in self._memory:
                return self._memory[key]
        if self.root is not None:
            path = self.root / f"{key}.json"
            if path.exists():
                value = MediaValue.from_json(json.loads(path.read_text()))
                with self._lock:
                    self._memory[key] = value
                return value
        return None

    def put(self, key: str, value: MediaValue) -> None:
        with self._lock:
            self._memory[key] = value
        if self.root is not None:
            (self.root / f"{key}.json").write_text(json.dumps(value.to_json()))


# -- run records -------------------------------------------------------------

PENDING, RUNNING, DONE, FAILED, SKIPPED = "pending", "running", "done", "failed", "skipped"


@dataclass
class PieceRun:
    status: str = PENDING
    input_hashes: tuple[str, ...] = ()
    output: MediaValue | None = None
    wall_time_ms: float = 0.0
    error: str | None = None
    cache_hit: bool = False
    started_at: float | None = None
    finished_at: float | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "input_hashes": list(self.input_hashes),
            "output": self.output.to_json() if self.output else None,
            "wall_time_ms": self.wall_time_ms,
            "error": self.error,
            "cache_hit": self.cache_hit,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }


@dataclass(frozen=True)
class RunEvent:
    run_id: str
    seq: int
    kind: str  # piece_started | piece_done | piece_failed | run_done
    instance_id: str | None = None
    modality: str | None = None
    output_hash: str | None = None
    status: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "seq": self.seq,
            "kind": self.kind,
            "instance_id": self.instance_id,
            "modality": self.modality,
            "output_hash": self.output_hash,
            "status": self.status,
        }


class RunRecord:
    """Per-chain execution trace, safe for one writer and many readers."""

    def __init__(self, run_id: str, chain: Chain, snapshot: dict[str, Any]):
        self.run_id = run_id
        self.chain_id = chain.chain_id
        self.piece_order = list(chain.piece_ids)
        self.connections = list(chain.connections)
        self.snapshot = snapshot
        self.entries: dict[str, PieceRun] = {pid: PieceRun() for pid in chain.piece_ids}
        self.status = RUNNING
        self.created_at = time.time()
        self.finished_at: float | None = None
        self.events: list[RunEvent] = []
        self._cond = threading.Condition()

    # -- writer side ---------------------------------------------------------

    def _emit(self, kind: str, instance_id: str | None = None, value: MediaValue | None = None,
              status: str | None = None) -> None:
        with self._cond:
            event = RunEvent(
                run_id=self.run_id,
                seq=len(self.events),
                kind=kind,
                instance_id=instance_id,
                modality=str(value.modality) if value else None,
                output_hash=value.hash if value else None,
                status=status,
            )
            self.events.append(event)
            self._cond.notify_all()

    def mark_running(self, instance_id: str) -> None:
        with self._cond:
            entry = self.entries[instance_id]
            entry.status = RUNNING
            entry.started_at = time.time()
        self._emit("piece_started", instance_id, status=RUNNING)

    def mark_done(self, instance_id: str, value: MediaValue,
                  input_hashes: tuple[str, ...], cache_hit: bool) -> None:
        with self._cond:
            entry = self.entries[instance_id]
            entry.status = DONE
            entry.output = value
            entry.input_hashes = input_hashes
            entry.cache_hit = cache_hit
            entry.finished_at = time.time()
            if entry.started_at is not None:
                entry.wall_time_ms = (entry.finished_at - entry.started_at) * 1000.0
        self._emit("piece_done", instance_id, value, status=DONE)

    def mark_failed(self, instance_id: str, error: str) -> None:
        with self._cond:
            entry = self.entries[instance_id]
            entry.status = FAILED
            entry.error = error
            entry.finished_at = time.time()
            if entry.started_at is not None:
                entry.wall_time_ms = (entry.finished_at - entry.started_at) * 1000.0
        self._emit("piece_failed", instance_id, status=FAILED)

    def mark_skipped(self, instance_id: str) -> None:
        with self._cond:
            self.entries[instance_id].status = SKIPPED

    def finish(self) -> None:
        with self._cond:
            self.status = (
                DONE
                if all(e.status == DONE for e in self.entries.values())
                else FAILED
            )
            self.finished_at = time.time()
        self._emit("run_done", status=self.status)

    # -- reader side ---------------------------------------------------------

    def wait_events(self, after_seq: int, timeout: float = 10.0) -> list[RunEvent]:
        """Events with seq > after_seq, blocking briefly if none yet."""
        deadline = time.monotonic() + timeout
        with self._cond:
            while True:
                fresh = [e for e in self.events if e.seq > after_seq]
                if fresh or self.finished_at is not None:
                    return fresh
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return []
                self._cond.wait(remaining)

    def final_output(self) -> MediaValue | None:
        terminal = self.piece_order[-1] if self.piece_order else None
        if terminal is None:
            return None
        entry = self.entries[terminal]
        return entry.output

    def to_json(self) -> dict[str, Any]:
        with self._cond:
            return {
                "run_id": self.run_id,
                "chain_id": self.chain_id,
                "status": self.status,
                "created_at": self.created_at,
                "finished_at": self.finished_at,
                "snapshot": self.snapshot,
                "piece_order": list(self.piece_order),
                "entries": {pid: entry.to_json() for pid, entry in self.entries.items()},
            }


def intermediate_output(record: RunRecord, instance_id: str) -> MediaValue:
    """The cached value a piece produced in this run."""
    if instance_id not in record.entries:
        raise NotYetComputed(instance_id)
    entry = record.entries[instance_id]
    if entry.status == FAILED:
        raise PieceFailed(instance_id)
    if entry.status != DONE:
        raise NotYetComputed(instance_id)
    return entry.output


def trace_pair(record: RunRecord, upstream_id: str, downstream_id: str) -> tuple[MediaValue, MediaValue]:
    """Input-side and output-side values for side-by-side inspection."""
    if not _reachable(record, upstream_id, downstream_id):
        raise NotReachable(f"{downstream_id} not downstream of {upstream_id}")
    return intermediate_output(record, upstream_id), intermediate_output(record, downstream_id)


def _reachable(record: RunRecord, start: str, goal: str) -> bool:
    if start == goal:
        return start in record.entries
    frontier = [start]
    seen = {start}
    while frontier:
        node = frontier.pop()
        for conn in record.connections:
            if conn.from_instance == node and conn.to_instance not in seen:
                if conn.to_instance == goal:
                    return True
                seen.add(conn.to_instance)
                frontier.append(conn.to_instance)
    return False


# -- the executor ------------------------------------------------------------


class ChainRunner:
    """Executes validated chains against a registry, blob store, and cache."""

    def __init__(
        self,
        registry: AdapterRegistry,
        blobs: BlobStore,
        cache: OutputCache | None = None,
        piece_timeout: float = DEFAULT_PIECE_TIMEOUT,
    ):
        self.registry = registry
        self.blobs = blobs
        self.cache = cache if cache is not None else OutputCache()
        self.piece_timeout = piece_timeout

    def run_chain(
        self,
        mosaic: Mosaic,
        chain_id: int,
        user_inputs: dict[str, MediaValue],
        record: RunRecord | None = None,
    ) -> RunRecord:
        violations = mosaic.validate()
        if violations:
            raise InvalidMosaic(violations)
        chains = mosaic.chains()
        if not 0 <= chain_id < len(chains):
            raise NotYetComputed(f"no chain {chain_id}")
        chain = chains[chain_id]
        catalog = mosaic.catalog
        self.check_inputs(mosaic, chain, user_inputs)
        if record is None:
            record = self.prepare_record(mosaic, chain)
        values: dict[str, MediaValue] = {}
        failed_or_skipped: set[str] = set()
        for pid in chain.piece_ids:
            piece = mosaic.pieces[pid]
            spec = catalog.get(piece.spec_id)
            producers = mosaic.producers(pid)
            if any(producers.get(ch) in failed_or_skipped for ch in range(spec.arity)):
                record.mark_skipped(pid)
                failed_or_skipped.add(pid)
                continue
            record.mark_running(pid)
            try:
                if spec.kind is PieceKind.INPUT:
                    value = user_inputs[pid]
                    record.mark_done(pid, value, (), cache_hit=False)
                else:
                    inputs = [values[producers[ch]] for ch in range(spec.arity)]
                    value, cache_hit = self._execute(pid, spec, piece.parameters, inputs)
                    record.mark_done(
                        pid, value, tuple(v.hash for v in inputs), cache_hit
                    )
                values[pid] = value
            except Exception as exc:
                record.mark_failed(pid, f"{type(exc).__name__}: {exc}")
                failed_or_skipped.add(pid)
        record.finish()
        return record

    def prepare_record(self, mosaic: Mosaic, chain: Chain) -> RunRecord:
        snapshot = {
            "chain_id": chain.chain_id,
            "pieces": [
                {
                    "instance_id": pid,
                    "spec_id": mosaic.pieces[pid].spec_id,
                    "parameters": dict(mosaic.pieces[pid].parameters),
                }
                for pid in chain.piece_ids
            ],
            "connections": [
                {"from": c.from_instance, "to": c.to_instance, "channel": c.to_channel}
                for c in chain.connections
            ],
        }
        return RunRecord(uuid.uuid4().hex[:12], chain, snapshot)

    def check_inputs(
        self, mosaic: Mosaic, chain: Chain, user_inputs: dict[str, MediaValue]
    ) -> None:
        for pid in chain.piece_ids:
            spec = mosaic.catalog.get(mosaic.pieces[pid].spec_id)
            if spec.kind is PieceKind.INPUT:
                value = user_inputs.get(pid)
                if value is None:
                    raise MissingInput(pid)
                socket = spec.output_socket.modality
                if value.modality.base is not socket.base:
                    raise MissingInput(
                        pid, f"{pid} expects {socket}, got {value.modality}"
                    )
            else:
                producers = mosaic.producers(pid)
                for channel in range(spec.arity):
                    if channel not in producers:
                        raise MissingInput(pid, f"{pid} input {channel} is unconnected")

    def _execute(
        self,
        instance_id: str,
        spec: PieceSpec,
        parameters: dict[str, Any],
        inputs: list[MediaValue],
    ) -> tuple[MediaValue, bool]:
        p_hash = params_digest(parameters)
        input_hashes = tuple(v.hash for v in inputs)
        key = OutputCache.key(spec.spec_id, p_hash, input_hashes)
        cached = self.cache.get(key)
        if cached is not None:
            return cached, True
        adapter = self.registry.get(spec.spec_id)
        context = RunContext(self.blobs, instance_id, p_hash, input_hashes)
        value = self._call_with_timeout(adapter, inputs, parameters, context, instance_id)
        if value.modality != spec.output_socket.modality:
            raise AdapterFailure(
                instance_id,
                f"adapter returned {value.modality}, spec declares "
                f"{spec.output_socket.modality}",
            )
        self.cache.put(key, value)
        return value, False

    def _call_with_timeout(
        self,
        adapter: Adapter,
        inputs: list[MediaValue],
        parameters: dict[str, Any],
        context: RunContext,
        instance_id: str,
    ) -> MediaValue:
        from .errors import PieceTimeout

        pool = ThreadPoolExecutor(max_workers=1)
        future = pool.submit(adapter.execute, inputs, parameters, context)
        try:
            return future.result(timeout=self.piece_timeout)
        except FutureTimeout:
            future.cancel()
            raise PieceTimeout(instance_id, self.piece_timeout) from None
        finally:
            # a timed-out adapter thread must not block the run
            pool.shutdown(wait=False)
