"""Headless command-line surface: catalog, validation, runs, and the assistant.

JSON output mode emits exactly the bytes the HTTP service would for the
same operation (shared serialization path), so scripts can treat the two
interchangeably. Exit codes are stable per error class.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import serialize
from .assistant import assist
from .catalog import Catalog, load_builtin
from .engine import AdapterRegistry, ChainRunner, GlueAdapter
from .errors import (
    ClientError,
    InvalidMosaic,
    MissingInput,
    MosaicStudioError,
    NotFound,
    UnrepairablePlan,
)
from .glue import CannedClient, ScriptedClient
from .media import MediaValue, default_format
from .modality import Base
from .mosaic import Mosaic
from .serialize import mosaic_from_json, mosaic_to_json
from .store import DOCUMENT_FORMAT_VERSION, WorkspaceStore

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_MISSING_INPUT = 4
EXIT_RUN_FAILED = 5
EXIT_UNREPAIRABLE = 6
EXIT_NOT_FOUND = 7


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosaic", description="Compose and run model piece chains headlessly."
    )
    parser.add_argument(
        "--workspace",
        default=os.environ.get("MOSAIC_WORKSPACE", "./workspace"),
        help="workspace directory (blobs, cache, runs)",
    )
    parser.add_argument(
        "--format", choices=("human", "json"), default="human", dest="output_format"
    )
    parser.add_argument("--adapters", help="HTTP adapter endpoint config file")
    parser.add_argument(
        "--transcript",
        default=os.environ.get("MOSAIC_LLM_TRANSCRIPT"),
        help="scripted LLM transcript JSON for stubbed runs",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    catalog_cmd = commands.add_parser("catalog", help="inspect the piece catalog")
    catalog_sub = catalog_cmd.add_subparsers(dest="subcommand", required=True)
    catalog_sub.add_parser("list", help="list every piece spec")
    search = catalog_sub.add_parser("search", help="semantic search over the catalog")
    search.add_argument("query")
    search.add_argument("-k", type=int, default=10)

    mosaic_cmd = commands.add_parser("mosaic", help="validate or run mosaic files")
    mosaic_sub = mosaic_cmd.add_subparsers(dest="subcommand", required=True)
    validate = mosaic_sub.add_parser("validate", help="check a mosaic file")
    validate.add_argument("file")
    run = mosaic_sub.add_parser("run", help="execute one chain of a mosaic file")
    run.add_argument("file")
    run.add_argument("--chain", type=int, default=0)
    run.add_argument(
        "--input",
        action="append",
        default=[],
        metavar="INSTANCE=VALUE",
        help="bind an input piece: text inline, media as a file path",
    )

    assist_cmd = commands.add_parser("assist", help="plan a chain for a task")
    assist_cmd.add_argument("task")
    assist_cmd.add_argument(
        "--apply", metavar="FILE", help="materialize onto this mosaic file"
    )

    commands.add_parser("serve", help="start the HTTP service")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except NotFound as exc:
        _fail(args, exc)
        return EXIT_NOT_FOUND
    except InvalidMosaic as exc:
        _emit(args, serialize.violations_to_json(exc.violations))
        return EXIT_INVALID
    except MissingInput as exc:
        _fail(args, exc)
        return EXIT_MISSING_INPUT
    except UnrepairablePlan as exc:
        _emit(
            args,
            {"materialized": False, "rounds": [r.to_json() for r in exc.rounds]},
        )
        return EXIT_UNREPAIRABLE
    except (ClientError, MosaicStudioError) as exc:
        _fail(args, exc)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        _fail(args, exc)
        return EXIT_NOT_FOUND


def _dispatch(args: argparse.Namespace) -> int:
    catalog = load_builtin()
    if args.command == "catalog":
        return _cmd_catalog(args, catalog)
    if args.command == "mosaic":
        if args.subcommand == "validate":
            return _cmd_validate(args, catalog)
        return _cmd_run(args, catalog)
    if args.command == "assist":
        return _cmd_assist(args, catalog)
    if args.command == "serve":
        from .service import ServiceConfig, create_app
        import uvicorn

        config = ServiceConfig.from_env(
            {**os.environ, "MOSAIC_WORKSPACE": str(args.workspace)}
        )
        uvicorn.run(create_app(config), host="127.0.0.1", port=config.port)
        return EXIT_OK
    return EXIT_USAGE


def _cmd_catalog(args: argparse.Namespace, catalog: Catalog) -> int:
    if args.subcommand == "list":
        if args.output_format == "json":
            _print(serialize.dumps(catalog.to_document()))
        else:
            for spec in catalog.specs.values():
                arrow = " + ".join(str(s.modality) for s in spec.input_sockets) or "-"
                _print(
                    f"{spec.spec_id:46s} {arrow} -> {spec.output_socket.modality}"
                )
        return EXIT_OK
    hits = catalog.search(args.query, args.k)
    if args.output_format == "json":
        _print(
            serialize.dumps(
                {"hits": [{"spec_id": h.spec_id, "score": h.score, "rank": h.rank} for h in hits]}
            )
        )
    else:
        for hit in hits:
            _print(hit.spec_id)
    return EXIT_OK


def _load_mosaic_file(path: str, catalog: Catalog) -> tuple[Mosaic, dict[str, Any]]:
    body = json.loads(Path(path).read_text())
    graph = body.get("mosaic", body)
    mosaic, _ = mosaic_from_json(catalog, graph)
    return mosaic, body


def _cmd_validate(args: argparse.Namespace, catalog: Catalog) -> int:
    mosaic, _ = _load_mosaic_file(args.file, catalog)
    violations = mosaic.validate()
    _emit(args, serialize.violations_to_json(violations))
    return EXIT_OK if not violations else EXIT_INVALID


def _cmd_run(args: argparse.Namespace, catalog: Catalog) -> int:
    mosaic, _ = _load_mosaic_file(args.file, catalog)
    violations = mosaic.validate()
    if violations:
        raise InvalidMosaic(violations)
    store = WorkspaceStore(args.workspace, catalog)
    if args.adapters:
        registry = AdapterRegistry.from_config_file(catalog, args.adapters)
    else:
        registry = AdapterRegistry(catalog)
    if args.transcript:
        registry.register(GlueAdapter(ScriptedClient.from_file(args.transcript)))
    runner = ChainRunner(registry, store.blobs, store.cache)
    inputs = _parse_inputs(args.input, mosaic, store)
    record = runner.run_chain(mosaic, args.chain, inputs)
    store.save_run(record)
    if args.output_format == "json":
        _print(serialize.dumps(record.to_json()))
    else:
        for pid in record.piece_order:
            entry = record.entries[pid]
            spec_id = mosaic.pieces[pid].spec_id
            line = f"{pid:6s} {spec_id:46s} {entry.status}"
            if entry.output is not None:
                line += f"  {entry.output.modality} {entry.output.hash[:12]}"
            if entry.error:
                line += f"  {entry.error}"
            _print(line)
        _print(f"run {record.run_id}: {record.status}")
    return EXIT_OK if record.status == "done" else EXIT_RUN_FAILED


def _parse_inputs(
    bindings: list[str], mosaic: Mosaic, store: WorkspaceStore
) -> dict[str, MediaValue]:
    inputs: dict[str, MediaValue] = {}
    for binding in bindings:
        if "=" not in binding:
            raise MissingInput(binding, f"malformed --input {binding!r}, expected id=value")
        instance_id, value = binding.split("=", 1)
        piece = mosaic.pieces.get(instance_id)
        if piece is None:
            raise MissingInput(instance_id, f"unknown instance {instance_id}")
        modality = mosaic.catalog.get(piece.spec_id).output_socket.modality
        if modality.base is Base.TEXT:
            inputs[instance_id] = MediaValue.from_text(value)
        else:
            path = Path(value)
            if not path.exists():
                raise MissingInput(instance_id, f"no such file: {value}")
            suffix = path.suffix.lstrip(".").lower() or default_format(modality)
            fmt = suffix if suffix in ("png", "jpg", "mp4", "glb", "wav", "svg") else default_format(modality)
            inputs[instance_id] = store.blobs.put_value(path.read_bytes(), modality, fmt)
    return inputs


def _cmd_assist(args: argparse.Namespace, catalog: Catalog) -> int:
    client = (
        ScriptedClient.from_file(args.transcript) if args.transcript else CannedClient()
    )
    if args.apply and Path(args.apply).exists():
        mosaic, body = _load_mosaic_file(args.apply, catalog)
    else:
        mosaic, body = Mosaic(catalog), {}
    result = assist(args.task, catalog, client, mosaic)
    if args.apply:
        document = {
            "format_version": DOCUMENT_FORMAT_VERSION,
            "title": body.get("title", "Assistant mosaic"),
            "version": int(body.get("version", 0)) + 1,
            "catalog_fingerprint": catalog.fingerprint(),
            "mosaic": mosaic_to_json(mosaic),
        }
        if "id" in body:
            document["id"] = body["id"]
        Path(args.apply).write_text(json.dumps(document, indent=2))
    payload = {
        "materialized": True,
        "report": result.report.to_json(),
        "rounds": [r.to_json() for r in result.rounds],
        "added_instances": result.added_instances,
    }
    if args.output_format == "json":
        _print(serialize.dumps(payload))
    else:
        for pid in result.added_instances:
            _print(f"added {pid} ({mosaic.pieces[pid].spec_id})")
        _print("machine criteria: pass")
    return EXIT_OK


def _emit(args: argparse.Namespace, payload: dict[str, Any]) -> None:
    if args.output_format == "json":
        _print(serialize.dumps(payload))
    else:
        violations = payload.get("violations")
        if violations is not None:
            if not violations:
                _print("valid")
            for violation in violations:
                where = violation.get("instance_id") or violation.get("connection") or ""
                _print(f"{violation['code']}: {violation['message']} {where}".rstrip())
        elif payload.get("materialized") is False:
            _print("unrepairable plan; nothing applied")


def _fail(args: argparse.Namespace, exc: Exception) -> None:
    code = getattr(exc, "code", "error")
    if args.output_format == "json":
        _print(serialize.dumps({"error": code, "message": str(exc)}))
    else:
        print(f"error ({code}): {exc}", file=sys.stderr)


def _print(text: str) -> None:
    sys.stdout.write(text + "\n")


if __name__ == "__main__":
    sys.exit(main())
