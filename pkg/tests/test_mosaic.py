from __future__ import annotations

import pytest

from mosaic_studio import (
    AddPiece,
    Connect,
    Disconnect,
    DuplicatePiece,
    Mosaic,
    MovePieces,
    RemovePiece,
    SetParameter,
)
from mosaic_studio.errors import (
    CycleWouldForm,
    IncompatibleConnection,
    InvalidMosaic,
    NothingToRedo,
    NothingToUndo,
    OccupiedInputChannel,
    ParameterOutOfBounds,
    UnknownInstance,
    UnknownSpec,
)
from mosaic_studio.mosaic import PIECE_HEIGHT, PIECE_WIDTH, SNAP_RADIUS, socket_position


@pytest.fixture
def mosaic(catalog):
    return Mosaic(catalog)


def add(mosaic, spec_id, pos=(0.0, 0.0), params=None):
    edit = AddPiece(spec_id, pos, params)
    mosaic.apply(edit)
    return edit.instance_id


def test_empty_mosaic_is_valid(mosaic):
    assert mosaic.validate() == []
    assert mosaic.chains() == []


def test_add_and_connect_compatible_pieces(mosaic):
    photo = add(mosaic, "upload_image")
    tags = add(mosaic, "tag_image", (200, 0))
    mosaic.apply(Connect(photo, tags, 0))
    assert mosaic.validate() == []


def test_connect_refuses_incompatible_endpoints(mosaic):
    photo = add(mosaic, "upload_image")
    gpt = add(mosaic, "ask_gpt", (200, 0))
    with pytest.raises(IncompatibleConnection):
        mosaic.apply(Connect(photo, gpt, 0))
    assert mosaic.connections == []
    # the failed edit must not land in the journal
    with pytest.raises(NothingToUndo):
        mosaic.undo()
        mosaic.undo()
        mosaic.undo()


def test_plain_image_does_not_satisfy_refined_input(mosaic):
    photo = add(mosaic, "upload_image")
    depth_gen = add(mosaic, "generate_image_from_text_and_depth_map", (200, 0))
    with pytest.raises(IncompatibleConnection):
        mosaic.apply(Connect(photo, depth_gen, 0))


def test_refined_output_feeds_plain_input(mosaic):
    photo = add(mosaic, "upload_image")
    depth = add(mosaic, "get_depth_map", (200, 0))
    caption = add(mosaic, "describe_image", (400, 0))
    mosaic.apply(Connect(photo, depth, 0))
    mosaic.apply(Connect(depth, caption, 0))
    assert mosaic.validate() == []


def test_occupied_input_channel_rejected(mosaic):
    a = add(mosaic, "upload_image")
    b = add(mosaic, "upload_image", (0, 200))
    tags = add(mosaic, "tag_image", (200, 0))
    mosaic.apply(Connect(a, tags, 0))
    with pytest.raises(OccupiedInputChannel):
        mosaic.apply(Connect(b, tags, 0))


def test_fan_out_is_allowed(mosaic):
    photo = add(mosaic, "upload_image")
    tags = add(mosaic, "tag_image", (200, 0))
    caption = add(mosaic, "describe_image", (200, 200))
    mosaic.apply(Connect(photo, tags, 0))
    mosaic.apply(Connect(photo, caption, 0))
    assert mosaic.validate() == []
    assert len(mosaic.chains()) == 1


def test_cycle_refused(mosaic):
    a = add(mosaic, "increase_image_resolution")
    b = add(mosaic, "remove_image_background", (200, 0))
    mosaic.apply(Connect(a, b, 0))
    with pytest.raises(CycleWouldForm):
        mosaic.apply(Connect(b, a, 0))
    with pytest.raises(CycleWouldForm):
        mosaic.apply(Connect(a, a, 0))


def test_unknown_references(mosaic):
    with pytest.raises(UnknownSpec):
        mosaic.apply(AddPiece("text2hologram", (0, 0)))
    with pytest.raises(UnknownInstance):
        mosaic.apply(RemovePiece("p999"))
    with pytest.raises(UnknownInstance):
        mosaic.apply(Connect("p1", "p2", 0))


def test_parameters_checked_on_add_and_set(mosaic):
    gen = add(mosaic, "generate_image")
    mosaic.apply(SetParameter(gen, "seed", 123))
    assert mosaic.pieces[gen].parameters["seed"] == 123
    with pytest.raises(ParameterOutOfBounds):
        mosaic.apply(SetParameter(gen, "seed", -1))
    with pytest.raises(ParameterOutOfBounds):
        mosaic.apply(SetParameter(gen, "seed", 2**32))
    with pytest.raises(ParameterOutOfBounds):
        mosaic.apply(SetParameter(gen, "sharpness", 1))
    with pytest.raises(ParameterOutOfBounds):
        mosaic.apply(AddPiece("generate_image", (0, 0), {"steps": 0}))


def test_defaults_populated_on_add(mosaic, catalog):
    gen = add(mosaic, "generate_image")
    spec = catalog.get("generate_image")
    assert mosaic.pieces[gen].parameters == spec.default_parameters()


def test_duplicate_copies_spec_and_offsets_position(mosaic):
    photo = add(mosaic, "upload_image", (10, 20))
    edit = DuplicatePiece(photo)
    mosaic.apply(edit)
    twin = mosaic.pieces[edit.new_instance_id]
    assert twin.spec_id == "upload_image"
    assert twin.position != (10, 20)
    assert twin.instance_id != photo


def test_undo_redo_round_trip(mosaic):
    before = mosaic.graph_state()
    photo = add(mosaic, "upload_image")
    after_add = mosaic.graph_state()
    mosaic.undo()
    assert mosaic.graph_state() == before
    mosaic.redo()
    assert mosaic.graph_state() == after_add
    with pytest.raises(NothingToRedo):
        mosaic.redo()
    assert photo in mosaic.pieces


def test_undo_is_inverse_for_every_edit_kind(mosaic):
    photo = add(mosaic, "upload_image")
    tags = add(mosaic, "tag_image", (200, 0))
    mosaic.apply(Connect(photo, tags, 0))
    edits = [
        AddPiece("describe_image", (400, 0)),
        DuplicatePiece(photo),
        MovePieces({photo: (50.0, 60.0)}),
        SetParameter(tags, "max_tags", 5),
        Disconnect(photo, tags, 0),
        RemovePiece(tags),
    ]
    for edit in edits:
        before = mosaic.graph_state()
        mosaic.apply(edit)
        mosaic.undo()
        assert mosaic.graph_state() == before, type(edit).__name__
        mosaic.redo()  # keep the edit applied for the next iteration


def test_three_edits_undo_two_redo_one(mosaic):
    add(mosaic, "upload_image")
    states = [mosaic.graph_state()]
    add(mosaic, "tag_image", (200, 0))
    states.append(mosaic.graph_state())
    add(mosaic, "describe_image", (400, 0))
    mosaic.undo()
    mosaic.undo()
    assert mosaic.graph_state() == states[0]
    mosaic.redo()
    assert mosaic.graph_state() == states[1]


def test_new_edit_truncates_redo_tail(mosaic):
    add(mosaic, "upload_image")
    add(mosaic, "tag_image", (200, 0))
    mosaic.undo()
    add(mosaic, "describe_image", (200, 200))
    with pytest.raises(NothingToRedo):
        mosaic.redo()


def test_remove_restores_connections_on_undo(mosaic):
    photo = add(mosaic, "upload_image")
    tags = add(mosaic, "tag_image", (200, 0))
    mosaic.apply(Connect(photo, tags, 0))
    mosaic.apply(RemovePiece(photo))
    assert mosaic.connections == []
    mosaic.undo()
    assert len(mosaic.connections) == 1
    assert mosaic.validate() == []


def test_journal_replay_reproduces_state(interior_mosaic):
    mosaic, _ = interior_mosaic
    mosaic.undo()
    mosaic.undo()
    replayed = mosaic.replay()
    assert replayed.graph_state() == mosaic.graph_state()


def test_validate_remains_clean_through_edit_sequences(interior_mosaic):
    mosaic, _ = interior_mosaic
    assert mosaic.validate() == []
    # every prefix of the journal is a valid mosaic too
    fresh = mosaic.replay()
    assert fresh.validate() == []


def test_chains_partition_and_topological_order(interior_mosaic):
    mosaic, ids = interior_mosaic
    chains = mosaic.chains()
    assert len(chains) == 3
    covered = [pid for chain in chains for pid in chain.piece_ids]
    assert sorted(covered) == sorted(mosaic.pieces)
    for chain in chains:
        seen = set()
        for pid in chain.piece_ids:
            for channel, producer in mosaic.producers(pid).items():
                assert producer in seen
            seen.add(pid)


def test_single_isolated_piece_is_a_chain(mosaic):
    add(mosaic, "upload_image")
    chains = mosaic.chains()
    assert len(chains) == 1
    assert len(chains[0].piece_ids) == 1


def test_two_disjoint_pairs_are_two_chains(mosaic):
    a = add(mosaic, "upload_image")
    b = add(mosaic, "tag_image", (200, 0))
    c = add(mosaic, "upload_audio", (0, 300))
    d = add(mosaic, "transcribe_speech", (200, 300))
    mosaic.apply(Connect(a, b, 0))
    mosaic.apply(Connect(c, d, 0))
    assert len(mosaic.chains()) == 2


def test_chains_refuses_invalid_mosaic(mosaic, catalog):
    pid = add(mosaic, "generate_image")
    mosaic.pieces[pid].parameters["seed"] = -5  # bypass the edit API
    with pytest.raises(InvalidMosaic):
        mosaic.chains()


def test_snap_finds_compatible_output(mosaic, catalog):
    photo = add(mosaic, "upload_image", (0.0, 0.0))
    out_pos = socket_position((0.0, 0.0), output=True)
    # place the dragged piece so its single input lands near the output
    drag_pos = (out_pos[0] + 10, out_pos[1] - PIECE_HEIGHT / 2)
    hit = mosaic.snap_candidates(catalog.get("tag_image"), drag_pos)
    assert hit is not None
    assert hit.target_instance == photo
    assert hit.channel == 0
    assert not hit.dragged_is_producer


def test_snap_repels_incompatible(mosaic, catalog):
    add(mosaic, "upload_image", (0.0, 0.0))
    out_pos = socket_position((0.0, 0.0), output=True)
    drag_pos = (out_pos[0] + 10, out_pos[1] - PIECE_HEIGHT / 2)
    assert mosaic.snap_candidates(catalog.get("ask_gpt"), drag_pos) is None


def test_snap_ignores_far_pieces(mosaic, catalog):
    add(mosaic, "upload_image", (0.0, 0.0))
    far = (PIECE_WIDTH + SNAP_RADIUS * 4, 0.0)
    assert mosaic.snap_candidates(catalog.get("tag_image"), far) is None


def test_snap_skips_occupied_inputs(mosaic, catalog):
    photo = add(mosaic, "upload_image", (0.0, 0.0))
    tags = add(mosaic, "tag_image", (300.0, 0.0))
    mosaic.apply(Connect(photo, tags, 0))
    # dragging another image producer near the occupied input finds nothing
    drag_pos = (300.0 - PIECE_WIDTH - 5, 0.0)
    hit = mosaic.snap_candidates(catalog.get("remove_people"), drag_pos)
    assert hit is None or not (hit.target_instance == tags and hit.dragged_is_producer)
