"""HTTP workspace service: catalog, mosaics, runs with event streaming, assist.

All JSON bodies are produced by :mod:`mosaic_studio.serialize`, the same
path the CLI uses, so the two surfaces emit identical bytes for identical
operations. Runs execute on a bounded worker pool; run creation returns
immediately and progress is observable via ``GET /runs/{id}/events``.
"""

from __future__ import annotations

import os
import threading
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from fastapi import FastAPI, Request, Response
from fastapi.responses import StreamingResponse

from . import serialize
from .assistant import assist
from .catalog import Catalog, load_builtin
from .engine import (
    DEFAULT_PIECE_TIMEOUT,
    AdapterRegistry,
    ChainRunner,
    GlueAdapter,
    RunRecord,
)
from .errors import (
    ClientError,
    EmptyQuery,
    EmptyTask,
    InvalidMosaic,
    MissingInput,
    NotFound,
    UnrepairablePlan,
    VersionConflict,
    VersionTooNew,
)
from .glue import (
    CannedClient,
    CompletionClient,
    HttpCompletionClient,
    ScriptedClient,
)
from .media import MIME_TYPES, MediaValue, format_for_mime
from .mosaic import Mosaic
from .scoring import RemoteEmbeddingProvider
from .store import WorkspaceStore


@dataclass
class ServiceConfig:
    workspace: Path
    port: int = 8819
    llm_endpoint: str | None = None
    llm_api_key: str | None = None
    llm_transcript: Path | None = None
    embed_endpoint: str | None = None
    embed_api_key: str | None = None
    adapter_config: Path | None = None
    piece_timeout: float = DEFAULT_PIECE_TIMEOUT
    run_workers: int = 4
    extra_glue_client: CompletionClient | None = field(default=None, repr=False)

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "ServiceConfig":
        env = dict(os.environ if env is None else env)
        workspace = env.get("MOSAIC_WORKSPACE")
        if not workspace:
            raise ValueError("MOSAIC_WORKSPACE is required")
        return cls(
            workspace=Path(workspace),
            port=int(env.get("MOSAIC_PORT", "8819")),
            llm_endpoint=env.get("MOSAIC_LLM_ENDPOINT"),
            llm_api_key=env.get("MOSAIC_LLM_KEY"),
            llm_transcript=Path(env["MOSAIC_LLM_TRANSCRIPT"])
            if env.get("MOSAIC_LLM_TRANSCRIPT")
            else None,
            embed_endpoint=env.get("MOSAIC_EMBED_ENDPOINT"),
            embed_api_key=env.get("MOSAIC_EMBED_KEY"),
            adapter_config=Path(env["MOSAIC_ADAPTERS"]) if env.get("MOSAIC_ADAPTERS") else None,
        )

    def completion_client(self) -> CompletionClient:
        if self.llm_transcript is not None:
            return ScriptedClient.from_file(self.llm_transcript)
        if self.llm_endpoint:
            return HttpCompletionClient(self.llm_endpoint, self.llm_api_key)
        return CannedClient()


def _json(payload: Any, status_code: int = 200) -> Response:
    return Response(
        content=serialize.dumps(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, code: str, message: str, **extra: Any) -> Response:
    return _json({"error": code, "message": message, **extra}, status_code)


def create_app(config: ServiceConfig, catalog: Catalog | None = None) -> FastAPI:
    if catalog is None:
        provider = None
        if config.embed_endpoint:
            provider = RemoteEmbeddingProvider(config.embed_endpoint, config.embed_api_key)
        catalog = load_builtin(provider)

    store = WorkspaceStore(config.workspace, catalog)
    if config.adapter_config is not None:
        registry = AdapterRegistry.from_config_file(catalog, config.adapter_config)
    else:
        registry = AdapterRegistry(catalog)
    if config.extra_glue_client is not None:
        registry.register(GlueAdapter(config.extra_glue_client, deterministic=False))
    elif config.llm_endpoint:
        registry.register(
            GlueAdapter(
                HttpCompletionClient(config.llm_endpoint, config.llm_api_key),
                deterministic=False,
            )
        )
    runner = ChainRunner(registry, store.blobs, store.cache, config.piece_timeout)

    app = FastAPI(title="mosaic-studio", docs_url=None, redoc_url=None)
    app.state.catalog = catalog
    app.state.store = store
    app.state.runner = runner
    app.state.config = config
    app.state.runs: dict[str, RunRecord] = {}
    app.state.pool = ThreadPoolExecutor(max_workers=config.run_workers)
    app.state.locks: dict[str, threading.Lock] = defaultdict(threading.Lock)

    # -- catalog -------------------------------------------------------------

    @app.get("/catalog")
    def get_catalog() -> Response:
        return _json(catalog.to_document())

    @app.get("/catalog/search")
    def search_catalog(q: str = "", k: int = 10) -> Response:
        try:
            hits = catalog.search(q, k)
        except (EmptyQuery, ValueError) as exc:
            return _error(400, "empty_query", str(exc))
        return _json(
            {"hits": [{"spec_id": h.spec_id, "score": h.score, "rank": h.rank} for h in hits]}
        )

    # -- mosaics ---------------------------------------------------------------

    def _document_body(document) -> dict[str, Any]:
        body = document.to_json()
        if document.flagged_instances:
            body["flagged_instances"] = document.flagged_instances
        return body

    @app.post("/mosaics")
    async def create_mosaic(request: Request) -> Response:
        body = await request.json() if await request.body() else {}
        mosaic_body = body.get("mosaic") or {"pieces": [], "connections": []}
        mosaic, flagged = serialize.mosaic_from_json(catalog, mosaic_body)
        try:
            document = store.save_mosaic(
                mosaic, title=body.get("title", "Untitled mosaic"),
                allow_flagged=bool(flagged),
            )
        except InvalidMosaic as exc:
            return _json(serialize.violations_to_json(exc.violations), 400)
        return _json(_document_body(document), 201)

    @app.get("/mosaics")
    def list_mosaics() -> Response:
        documents = store.list_documents()
        return _json({"mosaics": [d.to_json() for d in documents]})

    @app.get("/mosaics/{document_id}")
    def get_mosaic(document_id: str) -> Response:
        try:
            _, document = store.load_mosaic(document_id)
        except NotFound:
            return _error(404, "not_found", document_id)
        except VersionTooNew as exc:
            return _error(400, "version_too_new", str(exc))
        return _json(_document_body(document))

    @app.put("/mosaics/{document_id}")
    async def put_mosaic(document_id: str, request: Request) -> Response:
        body = await request.json()
        with app.state.locks[document_id]:
            try:
                current = store.load_document(document_id)
            except NotFound:
                return _error(404, "not_found", document_id)
            mosaic, flagged = serialize.mosaic_from_json(
                catalog, body.get("mosaic", {"pieces": [], "connections": []})
            )
            try:
                document = store.save_mosaic(
                    mosaic,
                    title=body.get("title", current.title),
                    document_id=document_id,
                    expected_version=body.get("version"),
                    allow_flagged=bool(flagged),
                )
            except VersionConflict as exc:
                return _error(409, "version_conflict", str(exc), version=current.version)
            except InvalidMosaic as exc:
                return _json(serialize.violations_to_json(exc.violations), 400)
        return _json(_document_body(document))

    # -- runs --------------------------------------------------------------------

    @app.post("/mosaics/{document_id}/chains/{chain_id}/runs")
    async def create_run(document_id: str, chain_id: int, request: Request) -> Response:
        body = await request.json() if await request.body() else {}
        try:
            mosaic, _ = store.load_mosaic(document_id)
        except NotFound:
            return _error(404, "not_found", document_id)
        violations = mosaic.validate()
        if violations:
            return _json(serialize.violations_to_json(violations), 400)
        chains = mosaic.chains()
        if not 0 <= chain_id < len(chains):
            return _error(404, "not_found", f"no chain {chain_id}")
        try:
            inputs = _decode_inputs(mosaic, body.get("inputs", {}))
            runner.check_inputs(mosaic, chains[chain_id], inputs)
        except MissingInput as exc:
            return _error(400, "missing_input", str(exc), instance_id=exc.instance_id)
        except (KeyError, ValueError) as exc:
            return _error(400, "bad_input", str(exc))
        record = runner.prepare_record(mosaic, chains[chain_id])
        app.state.runs[record.run_id] = record

        def execute() -> None:
            try:
                runner.run_chain(mosaic, chain_id, inputs, record)
            except Exception as exc:  # defensive: the record must always settle
                for pid, entry in record.entries.items():
                    if entry.status == "running":
                        record.mark_failed(pid, f"{type(exc).__name__}: {exc}")
                    elif entry.status == "pending":
                        record.mark_skipped(pid)
                if record.finished_at is None:
                    record.finish()
            finally:
                store.save_run(record)

        app.state.pool.submit(execute)
        return _json({"run_id": record.run_id, "status": record.status}, 202)

    def _decode_inputs(mosaic: Mosaic, raw: dict[str, Any]) -> dict[str, MediaValue]:
        inputs: dict[str, MediaValue] = {}
        for instance_id, entry in raw.items():
            piece = mosaic.pieces.get(instance_id)
            if piece is None:
                raise MissingInput(instance_id, f"unknown instance {instance_id}")
            spec = mosaic.catalog.get(piece.spec_id)
            modality = spec.output_socket.modality
            if "text" in entry and entry["text"] is not None:
                if modality.base.value != "text":
                    raise MissingInput(instance_id, f"{instance_id} expects {modality}")
                inputs[instance_id] = MediaValue.from_text(entry["text"])
            elif "blob" in entry:
                digest = entry["blob"]
                if not store.blobs.exists(digest):
                    raise MissingInput(instance_id, f"blob {digest} not uploaded")
                fmt = entry.get("format") or store.blobs.format_of(digest)
                inputs[instance_id] = MediaValue(
                    modality=modality, format=fmt, blob_hash=digest
                )
            else:
                raise MissingInput(instance_id, "input needs 'text' or 'blob'")
        return inputs

    def _find_run(run_id: str) -> RunRecord | None:
        return app.state.runs.get(run_id)

    @app.get("/runs/{run_id}")
    def get_run(run_id: str) -> Response:
        record = _find_run(run_id)
        if record is not None:
            return _json(record.to_json())
        try:
            return _json(store.load_run_json(run_id))
        except NotFound:
            return _error(404, "not_found", run_id)

    @app.get("/runs/{run_id}/events")
    def get_run_events(run_id: str) -> Response:
        record = _find_run(run_id)
        if record is None:
            return _error(404, "not_found", run_id)

        def stream() -> Iterator[str]:
            last_seq = -1
            while True:
                events = record.wait_events(last_seq, timeout=5.0)
                for event in events:
                    last_seq = event.seq
                    yield f"data: {serialize.dumps(event.to_json())}\n\n"
                if any(e.kind == "run_done" for e in events):
                    return
                if not events and record.finished_at is not None:
                    return

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/runs/{run_id}/pieces/{instance_id}/output")
    def get_piece_output(run_id: str, instance_id: str) -> Response:
        record = _find_run(run_id)
        if record is None:
            return _error(404, "not_found", run_id)
        entry = record.entries.get(instance_id)
        if entry is None:
            return _error(404, "not_found", instance_id)
        if entry.status == "failed":
            return _error(502, "piece_failed", entry.error or instance_id)
        if entry.status != "done":
            return _error(404, "not_yet_computed", instance_id)
        value = entry.output
        data = store.blobs.bytes_of(value)
        return Response(content=data, media_type=MIME_TYPES[value.format])

    # -- blobs ----------------------------------------------------------------

    @app.post("/blobs")
    async def upload_blob(request: Request) -> Response:
        data = await request.body()
        if not data:
            return _error(400, "empty_blob", "no content")
        fmt = request.query_params.get("format") or format_for_mime(
            request.headers.get("content-type", "")
        )
        if fmt is None or fmt not in MIME_TYPES:
            return _error(400, "unknown_format", "supply a known content-type or ?format=")
        digest = store.blobs.put(data, fmt)
        return _json({"hash": digest, "format": fmt, "size": len(data)}, 201)

    @app.get("/blobs/{digest}")
    def get_blob(digest: str) -> Response:
        try:
            data = store.blobs.get(digest)
            fmt = store.blobs.format_of(digest)
        except KeyError:
            return _error(404, "not_found", digest)
        return Response(content=data, media_type=MIME_TYPES.get(fmt, "application/octet-stream"))

    # -- assistant ---------------------------------------------------------------

    @app.post("/assist")
    async def post_assist(request: Request) -> Response:
        body = await request.json()
        task = body.get("task", "")
        document_id = body.get("mosaic_id")
        if document_id is None:
            return _error(400, "bad_request", "mosaic_id is required")
        client = config.completion_client()
        with app.state.locks[document_id]:
            try:
                mosaic, document = store.load_mosaic(document_id)
            except NotFound:
                return _error(404, "not_found", document_id)
            try:
                result = assist(task, catalog, client, mosaic)
            except EmptyTask as exc:
                return _error(400, "empty_task", str(exc))
            except UnrepairablePlan as exc:
                return _json(
                    {
                        "materialized": False,
                        "rounds": [r.to_json() for r in exc.rounds],
                    }
                )
            except ClientError as exc:
                return _error(502, exc.code, str(exc))
            document = store.save_mosaic(
                mosaic, title=document.title, document_id=document_id
            )
        return _json(
            {
                "materialized": True,
                "report": result.report.to_json(),
                "rounds": [r.to_json() for r in result.rounds],
                "added_instances": result.added_instances,
                "mosaic": document.to_json(),
            }
        )

    return app


def main() -> None:
    import uvicorn

    config = ServiceConfig.from_env()
    app = create_app(config)
    uvicorn.run(app, host="127.0.0.1", port=config.port)


if __name__ == "__main__":
    main()
