from __future__ import annotations

import pytest

from mosaic_studio.catalog import load_builtin, spec_to_json
from mosaic_studio.errors import EmptyQuery
from mosaic_studio.modality import Base
from mosaic_studio.pieces import PieceKind


def test_model_spec_count(catalog):
    assert len(catalog.model_specs) == 39


def test_one_input_piece_per_base(catalog):
    bases = [s.output_socket.modality.base for s in catalog.input_specs]
    assert sorted(b.value for b in bases) == sorted(b.value for b in Base)


def test_glue_piece_has_three_modes(catalog):
    glue = catalog.get("ask_gpt")
    assert glue.kind is PieceKind.GLUE
    mode = glue.parameter("mode")
    assert set(mode.choices) == {"custom", "translation", "ideation"}


def test_models_match_reference_table(catalog, model_table):
    rows = [
        {
            "name": spec.display_name,
            "inputs": [str(s.modality) for s in spec.input_sockets],
            "output": str(spec.output_socket.modality),
        }
        for spec in catalog.model_specs
    ]
    assert rows == model_table


def test_depth_guided_generation_signature(catalog):
    spec = catalog.get("generate_image_from_text_and_depth_map")
    assert [str(s.modality) for s in spec.input_sockets] == ["image(depth)", "text"]
    assert str(spec.output_socket.modality) == "image"


def test_voice_cloning_signature(catalog):
    spec = catalog.get("clone_a_voice")
    assert [str(s.modality) for s in spec.input_sockets] == ["audio", "audio"]
    assert str(spec.output_socket.modality) == "audio"


def test_alias_resolves_to_caption_capability(catalog):
    assert catalog.get("caption_image").spec_id == "describe_image"
    assert "caption_image" in catalog


def test_example_io_matches_sockets(catalog):
    for spec in catalog.specs.values():
        assert len(spec.example_io.inputs) == len(spec.input_sockets)
        for (mod, _), sock in zip(spec.example_io.inputs, spec.input_sockets):
            assert mod == sock.modality, spec.spec_id
        assert spec.example_io.output[0] == spec.output_socket.modality, spec.spec_id


def test_generative_pieces_have_bounded_seed(catalog):
    for spec_id in ("generate_image", "generate_music", "generate_video",
                    "generate_image_from_text_and_depth_map"):
        seed = catalog.get(spec_id).parameter("seed")
        assert seed is not None
        assert seed.minimum == 0
        assert seed.maximum == 2**32 - 1
        assert seed.default == 0


def test_search_top_hit_for_object_identification(catalog):
    hits = catalog.search("identify the objects inside the image", k=5)
    assert hits[0].spec_id == "tag_image"


def test_search_exact_names_rank_first(catalog):
    for spec in catalog.model_specs:
        hits = catalog.search(spec.display_name, k=1)
        assert hits[0].spec_id == spec.spec_id, spec.display_name


def test_search_is_deterministic(catalog):
    first = catalog.search("make a short film about a dragon", k=10)
    second = catalog.search("make a short film about a dragon", k=10)
    assert first == second


def test_search_hits_sorted_with_consecutive_ranks(catalog):
    hits = catalog.search("turn a sketch into artwork", k=8)
    assert [h.rank for h in hits] == list(range(1, len(hits) + 1))
    assert all(a.score >= b.score for a, b in zip(hits, hits[1:]))
    assert all(0.0 <= h.score <= 1.0 for h in hits)


def test_search_rejects_empty_query(catalog):
    with pytest.raises(EmptyQuery):
        catalog.search("   ")


def test_grouping_by_input_modality(catalog):
    groups = catalog.group_by_input_modality()
    assert "increase_image_resolution" in groups[Base.IMAGE]
    # dual-input specs appear under both input bases
    assert "generate_image_from_text_and_depth_map" in groups[Base.IMAGE]
    assert "generate_image_from_text_and_depth_map" in groups[Base.TEXT]
    # input pieces are grouped under what they produce
    assert "upload_image" in groups[Base.IMAGE]
    grouped = {sid for ids in groups.values() for sid in ids}
    assert grouped == set(catalog.specs)


def test_document_export_round_trips_fingerprint(catalog):
    doc = catalog.to_document()
    assert doc["format_version"] == 1
    assert len(doc["specs"]) == 45
    assert doc["fingerprint"] == load_builtin().fingerprint()
    by_id = {s["spec_id"]: s for s in doc["specs"]}
    assert by_id["generate_image_from_text_and_depth_map"]["inputs"] == ["image(depth)", "text"]
    assert by_id["ask_gpt"]["kind"] == "glue"


def test_spec_json_carries_tooltip_metadata(catalog):
    body = spec_to_json(catalog.get("generate_music"))
    assert body["typical_runtime_seconds"] > 0
    assert body["example_io"]["output"]["modality"] == "audio(music)"
    names = [p["name"] for p in body["parameters"]]
    assert "seed" in names
