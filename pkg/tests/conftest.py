from __future__ import annotations

import json
from pathlib import Path

import pytest

from mosaic_studio import AddPiece, Connect, Mosaic, RemovePiece, load_builtin

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def catalog():
    return load_builtin()


@pytest.fixture(scope="session")
def model_table():
    """Reference rows (name, inputs, output) for the bundled model pieces."""
    return json.loads((DATA_DIR / "builtin_model_table.json").read_text())


def build_interior_design_mosaic(catalog) -> tuple[Mosaic, dict[str, str]]:
    """The three-chain interior-redesign workspace, built via edits only.

    Chain a ideates a concept from a client photo, chain b produces the 2D
    and 3D mockups (the edge-map experiment is built then trashed, and depth
    pieces take its place), chain c captions the photo and scores music.
    Returns the mosaic and a name->instance_id map.
    """
    m = Mosaic(catalog)
    ids: dict[str, str] = {}

    def add(name, spec_id, x, y, params=None):
        edit = AddPiece(spec_id, (x, y), params)
        m.apply(edit)
        ids[name] = edit.instance_id
        return edit.instance_id

    # chain a: photo -> tags -> concept
    add("a_photo", "upload_image", 0, 0)
    add("a_tags", "tag_image", 200, 0)
    add("a_concept", "ask_gpt", 400, 0,
        {"mode": "ideation", "task": "contemporary interior concept"})
    m.apply(Connect(ids["a_photo"], ids["a_tags"], 0))
    m.apply(Connect(ids["a_tags"], ids["a_concept"], 0))

    # chain b: photo -> cleanup -> structure-preserving redesign -> 3D mockup
    add("b_photo", "upload_image", 0, 200)
    add("b_clean", "remove_people", 200, 200)
    m.apply(Connect(ids["b_photo"], ids["b_clean"], 0))

    # First try an edge-map pairing, then trash it in favor of depth.
    add("b_edges", "get_edge_map", 400, 200)
    add("b_edge_gen", "generate_image_from_text_and_edge_map", 600, 200)
    m.apply(Connect(ids["b_clean"], ids["b_edges"], 0))
    m.apply(Connect(ids["b_edges"], ids["b_edge_gen"], 0))
    m.apply(RemovePiece(ids.pop("b_edge_gen")))
    m.apply(RemovePiece(ids.pop("b_edges")))

    add("b_depth", "get_depth_map", 400, 200)
    add("b_concept_text", "type_text", 400, 320)
    add("b_redesign", "generate_image_from_text_and_depth_map", 600, 200)
    m.apply(Connect(ids["b_clean"], ids["b_depth"], 0))
    m.apply(Connect(ids["b_depth"], ids["b_redesign"], 0))
    m.apply(Connect(ids["b_concept_text"], ids["b_redesign"], 1))

    add("b_instruction", "type_text", 800, 320)
    add("b_staircase", "generate_image_from_text_and_driving_image", 800, 200)
    m.apply(Connect(ids["b_redesign"], ids["b_staircase"], 0))
    m.apply(Connect(ids["b_instruction"], ids["b_staircase"], 1))

    add("b_upscale", "increase_image_resolution", 1000, 200)
    add("b_mockup", "generate_3d_model_from_image", 1200, 200)
    m.apply(Connect(ids["b_staircase"], ids["b_upscale"], 0))
    m.apply(Connect(ids["b_upscale"], ids["b_mockup"], 0))

    # chain c: photo -> caption -> music idea -> music
    add("c_photo", "upload_image", 0, 400)
    add("c_caption", "describe_image", 200, 400)
    add("c_idea", "ask_gpt", 400, 400,
        {"mode": "ideation", "task": "a fitting musical backdrop"})
    add("c_music", "generate_music", 600, 400)
    m.apply(Connect(ids["c_photo"], ids["c_caption"], 0))
    m.apply(Connect(ids["c_caption"], ids["c_idea"], 0))
    m.apply(Connect(ids["c_idea"], ids["c_music"], 0))

    return m, ids


@pytest.fixture
def interior_mosaic(catalog):
    return build_interior_design_mosaic(catalog)
