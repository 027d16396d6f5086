from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from mosaic_studio import serialize
from mosaic_studio.mockmedia import make_png
from mosaic_studio.service import ServiceConfig, create_app
from tests.conftest import build_interior_design_mosaic


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(workspace=tmp_path / "ws")
    app = create_app(config)
    with TestClient(app) as client:
        yield client


def _create_simple_mosaic(client, catalog=None):
    body = {
        "title": "tagging",
        "mosaic": {
            "pieces": [
                {"instance_id": "p1", "spec_id": "upload_image",
                 "position": [0, 0], "parameters": {}},
                {"instance_id": "p2", "spec_id": "tag_image",
                 "position": [200, 0], "parameters": {"max_tags": 20}},
            ],
            "connections": [{"from": "p1", "to": "p2", "channel": 0}],
        },
    }
    response = client.post("/mosaics", json=body)
    assert response.status_code == 201, response.text
    return response.json()


def _upload_photo(client):
    response = client.post(
        "/blobs", content=make_png("client-photo"), headers={"content-type": "image/png"}
    )
    assert response.status_code == 201
    return response.json()["hash"]


def _wait_run(client, run_id, timeout=10.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/runs/{run_id}").json()
        if body["status"] in ("done", "failed"):
            return body
        time.sleep(0.02)
    raise AssertionError("run did not settle")


def test_catalog_endpoint_serves_all_specs(client):
    body = client.get("/catalog").json()
    assert len(body["specs"]) == 45
    kinds = {s["kind"] for s in body["specs"]}
    assert kinds == {"model", "input", "glue"}
    models = [s for s in body["specs"] if s["kind"] != "input"]
    assert len(models) == 39


def test_catalog_search_endpoint(client):
    body = client.get("/catalog/search", params={"q": "identify the objects inside the image", "k": 3}).json()
    assert body["hits"][0]["spec_id"] == "tag_image"
    assert client.get("/catalog/search", params={"q": "  "}).status_code == 400


def test_mosaic_crud_round_trip(client):
    document = _create_simple_mosaic(client)
    fetched = client.get(f"/mosaics/{document['id']}").json()
    assert fetched["mosaic"] == document["mosaic"]
    assert fetched["version"] == 1

    update = {
        "version": 1,
        "title": "tagging v2",
        "mosaic": fetched["mosaic"],
    }
    updated = client.put(f"/mosaics/{document['id']}", json=update).json()
    assert updated["version"] == 2

    stale = client.put(f"/mosaics/{document['id']}", json=update)
    assert stale.status_code == 409

    assert client.get("/mosaics/nope").status_code == 404


def test_invalid_mosaic_rejected_with_violations(client):
    body = {
        "mosaic": {
            "pieces": [
                {"instance_id": "p1", "spec_id": "upload_image",
                 "position": [0, 0], "parameters": {}},
                {"instance_id": "p2", "spec_id": "ask_gpt",
                 "position": [200, 0], "parameters": {}},
            ],
            "connections": [{"from": "p1", "to": "p2", "channel": 0}],
        }
    }
    response = client.post("/mosaics", json=body)
    assert response.status_code == 400
    codes = [v["code"] for v in response.json()["violations"]]
    assert "incompatible_connection" in codes


def test_unknown_spec_document_loads_flagged(client, tmp_path):
    document = _create_simple_mosaic(client)
    # corrupt the stored spec id to simulate a catalog mismatch
    path = next((tmp_path / "ws" / "mosaics").glob("*.json"))
    body = json.loads(path.read_text())
    body["mosaic"]["pieces"][1]["spec_id"] = "retired_model"
    body["mosaic"]["connections"] = []
    path.write_text(json.dumps(body))
    fetched = client.get(f"/mosaics/{document['id']}")
    assert fetched.status_code == 200
    assert fetched.json()["flagged_instances"] == ["p2"]
    pieces = {p["instance_id"] for p in fetched.json()["mosaic"]["pieces"]}
    assert pieces == {"p1", "p2"}


def test_run_lifecycle_with_events_and_outputs(client):
    document = _create_simple_mosaic(client)
    digest = _upload_photo(client)
    response = client.post(
        f"/mosaics/{document['id']}/chains/0/runs",
        json={"inputs": {"p1": {"blob": digest}}},
    )
    assert response.status_code == 202, response.text
    run_id = response.json()["run_id"]

    final = _wait_run(client, run_id)
    assert final["status"] == "done"
    assert final["entries"]["p2"]["status"] == "done"

    # event stream replays in order and terminates with run_done
    events = []
    with client.stream("GET", f"/runs/{run_id}/events") as stream:
        for line in stream.iter_lines():
            if line.startswith("data: "):
                events.append(json.loads(line[len("data: "):]))
    assert events[-1]["kind"] == "run_done"
    assert [e["seq"] for e in events] == sorted(e["seq"] for e in events)
    statuses = {}
    for event in events:
        if event["kind"].startswith("piece_"):
            statuses[event["instance_id"]] = event["kind"].split("_", 1)[1]
    assert statuses == {"p1": "done", "p2": "done"}

    # piece output bytes hash-match the record entry
    output = client.get(f"/runs/{run_id}/pieces/p2/output")
    assert output.status_code == 200
    import hashlib

    assert hashlib.sha256(output.content).hexdigest() == final["entries"]["p2"]["output"]["hash"]


def test_run_rejects_invalid_inputs(client):
    document = _create_simple_mosaic(client)
    response = client.post(f"/mosaics/{document['id']}/chains/0/runs", json={"inputs": {}})
    assert response.status_code == 400
    assert response.json()["error"] == "missing_input"

    response = client.post(
        f"/mosaics/{document['id']}/chains/0/runs",
        json={"inputs": {"p1": {"text": "not an image"}}},
    )
    assert response.status_code == 400


def test_run_on_invalid_mosaic_gives_violations(client, tmp_path):
    document = _create_simple_mosaic(client)
    path = next((tmp_path / "ws" / "mosaics").glob("*.json"))
    body = json.loads(path.read_text())
    body["mosaic"]["pieces"][1]["spec_id"] = "ask_gpt"  # image -> text input now illegal
    path.write_text(json.dumps(body))
    response = client.post(f"/mosaics/{document['id']}/chains/0/runs", json={"inputs": {}})
    assert response.status_code == 400
    codes = [v["code"] for v in response.json()["violations"]]
    assert "incompatible_connection" in codes


def test_blob_store_is_content_addressed(client):
    data = make_png("same-bytes")
    first = client.post("/blobs", content=data, headers={"content-type": "image/png"}).json()
    second = client.post("/blobs", content=data, headers={"content-type": "image/png"}).json()
    assert first["hash"] == second["hash"]
    fetched = client.get(f"/blobs/{first['hash']}")
    assert fetched.status_code == 200
    assert fetched.content == data
    assert fetched.headers["content-type"] == "image/png"
    assert client.get("/blobs/deadbeef").status_code == 404


def test_sketch_blob_binds_as_sketch_modality(client, catalog):
    body = {
        "mosaic": {
            "pieces": [
                {"instance_id": "p1", "spec_id": "draw_sketch",
                 "position": [0, 0], "parameters": {}},
                {"instance_id": "p2", "spec_id": "generate_image_from_text_and_sketch",
                 "position": [200, 0], "parameters": {}},
                {"instance_id": "p3", "spec_id": "type_text",
                 "position": [0, 200], "parameters": {}},
            ],
            "connections": [
                {"from": "p1", "to": "p2", "channel": 0},
                {"from": "p3", "to": "p2", "channel": 1},
            ],
        }
    }
    document = client.post("/mosaics", json=body).json()
    sketch = client.post(
        "/blobs", content=make_png("drawn"), headers={"content-type": "image/png"}
    ).json()
    response = client.post(
        f"/mosaics/{document['id']}/chains/0/runs",
        json={"inputs": {"p1": {"blob": sketch["hash"]},
                         "p3": {"text": "a cozy treehouse"}}},
    )
    assert response.status_code == 202
    final = _wait_run(client, response.json()["run_id"])
    assert final["status"] == "done"
    assert final["entries"]["p1"]["output"]["modality"] == "sketch"
    assert final["entries"]["p2"]["output"]["modality"] == "image"


def test_assist_endpoint_materializes_music_chain(tmp_path, catalog):
    music_plan = json.dumps(
        {
            "steps": [
                {"model": "caption_image", "inputs": ["user:image"]},
                {"model": "ask_gpt", "inputs": ["prev"],
                 "parameters": {"mode": "ideation", "task": "a fitting musical backdrop"}},
                {"model": "generate_music", "inputs": ["prev"]},
            ]
        }
    )
    transcript = [
        {"expect": "You are a helpful assistant",
         "response": '{"steps": [{"model": "text2hologram", "inputs": ["user:image"]}]}'},
        {"expect": "Here are four criteria", "response": music_plan},
    ]
    transcript_path = tmp_path / "transcript.json"
    transcript_path.write_text(json.dumps(transcript))
    config = ServiceConfig(workspace=tmp_path / "ws", llm_transcript=transcript_path)
    with TestClient(create_app(config)) as client:
        document = client.post("/mosaics", json={"title": "assist target"}).json()
        response = client.post(
            "/assist", json={"task": "help add music based on the image", "mosaic_id": document["id"]}
        )
        assert response.status_code == 200, response.text
        body = response.json()
        assert body["materialized"] is True
        assert len(body["added_instances"]) == 4
        assert body["mosaic"]["version"] == 2
        specs = {p["spec_id"] for p in body["mosaic"]["mosaic"]["pieces"]}
        assert specs == {"upload_image", "describe_image", "ask_gpt", "generate_music"}


def test_assist_unrepairable_reports_without_mutation(tmp_path):
    transcript = [
        {"expect": "", "response": "no json at all"},
        {"expect": "", "response": "still no json"},
    ]
    transcript_path = tmp_path / "transcript.json"
    transcript_path.write_text(json.dumps(transcript))
    config = ServiceConfig(workspace=tmp_path / "ws", llm_transcript=transcript_path)
    with TestClient(create_app(config)) as client:
        document = client.post("/mosaics", json={}).json()
        response = client.post(
            "/assist", json={"task": "do something", "mosaic_id": document["id"]}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["materialized"] is False
        assert len(body["rounds"]) == 2
        fetched = client.get(f"/mosaics/{document['id']}").json()
        assert fetched["mosaic"]["pieces"] == []
        assert fetched["version"] == 1


def test_walkthrough_mosaic_served_and_run(tmp_path, catalog):
    config = ServiceConfig(workspace=tmp_path / "ws")
    mosaic, ids = build_interior_design_mosaic(catalog)
    with TestClient(create_app(config)) as client:
        body = {"title": "interior redesign", "mosaic": serialize.mosaic_to_json(mosaic)}
        document = client.post("/mosaics", json=body).json()
        digest = _upload_photo(client)
        response = client.post(
            f"/mosaics/{document['id']}/chains/0/runs",
            json={"inputs": {ids["a_photo"]: {"blob": digest}}},
        )
        assert response.status_code == 202
        final = _wait_run(client, response.json()["run_id"])
        assert final["status"] == "done"
        tag_entry = final["entries"][ids["a_tags"]]
        assert tag_entry["output"]["modality"] == "text"
