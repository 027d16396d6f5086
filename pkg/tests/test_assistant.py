from __future__ import annotations

import json
import random
import string
from pathlib import Path

import pytest

from mosaic_studio import Mosaic
from mosaic_studio.assistant import (
    assist,
    build_critique_prompt,
    build_planner_prompt,
    materialize_plan,
    parse_plan,
    report_for_parse_failure,
    validate_plan,
)
from mosaic_studio.errors import EmptyTask, PlanParseError, UnrepairablePlan
from mosaic_studio.glue import ScriptedClient
from mosaic_studio.modality import compatible

GOLDEN = Path(__file__).parent / "data" / "golden"

MUSIC_PLAN = json.dumps(
    {
        "steps": [
            {"model": "caption_image", "inputs": ["user:image"]},
            {
                "model": "ask_gpt",
                "inputs": ["prev"],
                "parameters": {"mode": "ideation", "task": "a fitting musical backdrop"},
            },
            {"model": "generate_music", "inputs": ["prev"]},
        ]
    }
)


def test_planner_prompt_matches_golden(catalog):
    prompt = build_planner_prompt(catalog, "Add sound effects for an illustration")
    assert prompt == (GOLDEN / "planner_prompt.txt").read_text()


def test_planner_prompt_contains_task_and_39_entries(catalog):
    prompt = build_planner_prompt(catalog, "Add sound effects for an illustration")
    assert "Your task is to Add sound effects for an illustration." in prompt
    models_line = prompt.split("\n")[1]
    for i in range(1, 40):
        assert f"{i}. " in models_line
    assert "40. " not in models_line


def test_planner_prompt_is_stable(catalog):
    a = build_planner_prompt(catalog, "some task")
    b = build_planner_prompt(catalog, "some task")
    assert a == b


def test_planner_prompt_rejects_empty_task(catalog):
    with pytest.raises(EmptyTask):
        build_planner_prompt(catalog, "   ")


def test_critique_prompt_matches_golden(catalog):
    planner = build_planner_prompt(catalog, "Add sound effects for an illustration")
    answer = '{"steps": [{"model": "text2sound", "inputs": ["prev"]}]}'
    assert build_critique_prompt(planner, answer) == (GOLDEN / "critique_prompt.txt").read_text()


def test_parse_well_formed_plan():
    plan = parse_plan(MUSIC_PLAN)
    assert [s.model for s in plan.steps] == ["caption_image", "ask_gpt", "generate_music"]
    assert plan.steps[1].parameters["mode"] == "ideation"


def test_parse_prose_wrapped_plan():
    wrapped = f"Sure! Here is a chain that should work:\n```json\n{MUSIC_PLAN}\n```\nEnjoy."
    plan = parse_plan(wrapped)
    assert len(plan.steps) == 3


def test_parse_rejects_missing_steps():
    with pytest.raises(PlanParseError) as info:
        parse_plan('{"model": "x"}')
    assert any(path == "steps" for path, _ in info.value.errors)


def test_parse_rejects_no_json():
    with pytest.raises(PlanParseError):
        parse_plan("I would use a captioning model and then a music model.")


def test_parse_rejects_forward_reference():
    with pytest.raises(PlanParseError):
        parse_plan('{"steps": [{"model": "a", "inputs": [2]}, {"model": "b", "inputs": ["prev"]}]}')


def test_parse_rejects_two_terminals():
    with pytest.raises(PlanParseError):
        parse_plan(
            '{"steps": [{"model": "a", "inputs": ["user:image"]},'
            ' {"model": "b", "inputs": ["user:image"]}]}'
        )


def test_validate_music_plan_passes_machine_criteria(catalog):
    report = validate_plan(parse_plan(MUSIC_PLAN), catalog)
    assert report.machine_ok
    assert report.task_understood == "llm-judged"


def test_validate_flags_unknown_model(catalog):
    plan = parse_plan('{"steps": [{"model": "text2hologram", "inputs": ["user:text"]}]}')
    report = validate_plan(plan, catalog)
    assert not report.models_known.passed
    assert not report.machine_ok


def test_validate_flags_unconnectable_steps(catalog):
    plan = parse_plan(
        '{"steps": [{"model": "generate_image", "inputs": ["user:text"]},'
        ' {"model": "transcribe_speech", "inputs": ["prev"]}]}'
    )
    report = validate_plan(plan, catalog)
    assert report.models_known.passed
    assert not report.steps_connectable.passed


def test_validate_flags_arity_mismatch(catalog):
    plan = parse_plan(
        '{"steps": [{"model": "generate_image_from_text_and_depth_map", "inputs": ["user:text"]}]}'
    )
    report = validate_plan(plan, catalog)
    assert not report.steps_connectable.passed


def test_criterion_checker_agrees_with_core_compatibility(catalog):
    # every 1-input producer/consumer pair: plan-level verdict == core rule
    singles = [s for s in catalog.model_specs if s.arity == 1]
    for producer in singles:
        feed = f"user:{producer.input_sockets[0].modality.base.value}"
        for consumer in singles:
            plan = parse_plan(
                json.dumps(
                    {
                        "steps": [
                            {"model": producer.spec_id, "inputs": [feed]},
                            {"model": consumer.spec_id, "inputs": ["prev"]},
                        ]
                    }
                )
            )
            report = validate_plan(plan, catalog)
            expected = compatible(
                producer.output_socket.modality, consumer.input_sockets[0].modality
            )
            assert report.steps_connectable.passed == expected, (
                producer.spec_id,
                consumer.spec_id,
            )


def test_materialized_plan_passes_validation(catalog):
    mosaic = Mosaic(catalog)
    added = materialize_plan(mosaic, parse_plan(MUSIC_PLAN), catalog)
    assert len(added) == 4  # three steps plus the new input piece
    assert mosaic.validate() == []
    assert len(mosaic.chains()) == 1
    specs = {mosaic.pieces[pid].spec_id for pid in added}
    assert specs == {"upload_image", "describe_image", "ask_gpt", "generate_music"}


def test_materialization_lays_out_below_existing_rows(catalog, interior_mosaic):
    mosaic, _ = interior_mosaic
    lowest_before = max(p.position[1] for p in mosaic.pieces.values())
    added = materialize_plan(mosaic, parse_plan(MUSIC_PLAN), catalog)
    for pid in added:
        assert mosaic.pieces[pid].position[1] > lowest_before
    positions = [mosaic.pieces[pid].position for pid in added]
    assert len(set(positions)) == len(positions)


def test_assist_repairs_bad_first_round(catalog):
    mosaic = Mosaic(catalog)
    bad = '{"steps": [{"model": "text2hologram", "inputs": ["user:image"]}]}'
    client = ScriptedClient(
        [
            ("You are a helpful assistant", bad),
            ("Here are four criteria", MUSIC_PLAN),
        ]
    )
    result = assist("help add music based on the image", catalog, client, mosaic)
    assert result.report.machine_ok
    assert len(result.added_instances) == 4
    assert mosaic.validate() == []
    assert not result.rounds[0].report.machine_ok
    assert result.rounds[1].report.machine_ok


def test_assist_critiques_even_when_first_round_valid(catalog):
    mosaic = Mosaic(catalog)
    client = ScriptedClient(
        [
            ("You are a helpful assistant", MUSIC_PLAN),
            ("Here are four criteria", MUSIC_PLAN),
        ]
    )
    result = assist("help add music based on the image", catalog, client, mosaic)
    # both transcript entries consumed: the critique round always runs
    assert client.cursor == 2
    assert result.report.machine_ok
    assert len(mosaic.pieces) == 4


def test_assist_falls_back_to_valid_first_round(catalog):
    mosaic = Mosaic(catalog)
    client = ScriptedClient(
        [
            ("", MUSIC_PLAN),
            ("", "All four criteria are satisfied."),
        ]
    )
    result = assist("help add music based on the image", catalog, client, mosaic)
    assert result.report.machine_ok
    assert len(mosaic.pieces) == 4


def test_assist_unrepairable_leaves_mosaic_unchanged(catalog):
    mosaic = Mosaic(catalog)
    bad = '{"steps": [{"model": "text2hologram", "inputs": ["user:image"]}]}'
    client = ScriptedClient([("", bad), ("", "still no valid plan, sorry")])
    with pytest.raises(UnrepairablePlan) as info:
        assist("help add music based on the image", catalog, client, mosaic)
    assert len(info.value.rounds) == 2
    assert mosaic.pieces == {}
    assert mosaic.connections == []


def test_parse_failure_report_marks_criterion_four():
    try:
        parse_plan("no json here")
    except PlanParseError as exc:
        report = report_for_parse_failure(exc)
    assert not report.json_well_formed.passed
    assert not report.machine_ok


def test_parse_plan_fuzzing_never_crashes():
    rng = random.Random(20260810)
    alphabet = string.printable + "{}[]:,\"'"
    samples = 2000
    for _ in range(samples):
        length = rng.randrange(0, 120)
        raw = "".join(rng.choice(alphabet) for _ in range(length))
        try:
            parse_plan(raw)
        except PlanParseError:
            pass
    # structured JSON-ish inputs
    for _ in range(500):
        body = {
            "steps": [
                {
                    "model": rng.choice(["generate_image", 7, None, ["x"]]),
                    "inputs": rng.choice(
                        [["prev"], [0], ["user:image"], [True], "prev", None, [{}]]
                    ),
                    "parameters": rng.choice([{}, {"seed": 1}, [], "x"]),
                }
                for _ in range(rng.randrange(0, 4))
            ]
        }
        try:
            parse_plan(json.dumps(body))
        except PlanParseError:
            pass
