"""The assembly assistant: plan a chain for a task, self-critique once,
machine-check the result, and place it on the canvas.

The planner asks the completion client for a chain in a fixed JSON shape:

    {"steps": [{"model": "<spec_id>",
                "inputs": ["prev" | "user:<modality>" | <step index>, ...],
                "parameters": {...}}]}

A critique round is always issued (self-evaluation against four criteria);
criteria 2-4 are then recomputed by machine, never trusted from the LLM.
Criterion 1 (task understood) is not machine-checkable and is surfaced as
llm-judged.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Union

from .catalog import Catalog
from .errors import EmptyTask, PlanParseError, UnrepairablePlan
from .glue import CompletionClient
from .modality import Base, Modality, compatible
from .mosaic import PIECE_HEIGHT, PIECE_WIDTH, AddPiece, Connect, Mosaic

PLANNER_TEMPLATE = (
    "You are a helpful assistant given a set of AI models to complete the user's task.\n"
    "There are thirty-nine models: {models}\n"
    "You can only use the models given. You do not have to use all the models.\n"
    "You will answer in a JSON format. Here is an example answer: {example}.\n"
    "Your task is to {task}."
)

CRITERIA_TEXT = (
    "Here are four criteria that the answer needs to satisfy. If any criteria are "
    "not satisfied, please give me the corrected answer in JSON format.\n"
    "1. Whether the user's task was understood and completed.\n"
    "2. Whether no models outside of the provided ones were used.\n"
    "3. Whether the output and input of each step can be connected.\n"
    "4. Whether it follows the correct JSON format."
)

EXAMPLE_ANSWER = (
    '{"steps": [{"model": "describe_image", "inputs": ["user:image"]}, '
    '{"model": "generate_music", "inputs": ["prev"]}]}'
)

_USER_BINDING_RE = re.compile(r"^user:([a-z0-9]+)$")


@dataclass(frozen=True)
class UserBinding:
    base: Base


Binding = Union[str, int, UserBinding]  # "prev" | step index | new user input


@dataclass(frozen=True)
class PlanStep:
    model: str
    inputs: tuple[Binding, ...]
    parameters: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...]
    raw_json: str


@dataclass(frozen=True)
class CriterionResult:
    passed: bool
    details: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    """Machine results for criteria 2-4; criterion 1 stays llm-judged."""

    task_understood: str = "llm-judged"
    models_known: CriterionResult = CriterionResult(True)
    steps_connectable: CriterionResult = CriterionResult(True)
    json_well_formed: CriterionResult = CriterionResult(True)

    @property
    def machine_ok(self) -> bool:
        return (
            self.models_known.passed
            and self.steps_connectable.passed
            and self.json_well_formed.passed
        )

    def to_json(self) -> dict[str, Any]:
        def result(r: CriterionResult) -> dict[str, Any]:
            return {"passed": r.passed, "details": list(r.details)}

        return {
            "task_understood": self.task_understood,
            "models_known": result(self.models_known),
            "steps_connectable": result(self.steps_connectable),
            "json_well_formed": result(self.json_well_formed),
            "machine_ok": self.machine_ok,
        }


def build_planner_prompt(catalog: Catalog, task: str) -> str:
    """The planner prompt: numbered model list, example answer, user task."""
    if not task.strip():
        raise EmptyTask("task is empty")
    entries = []
    for i, spec in enumerate(catalog.model_specs, start=1):
        capability = spec.description[0].lower() + spec.description[1:]
        entries.append(f"{i}. {spec.spec_id}() {capability}")
    return PLANNER_TEMPLATE.format(
        models=" ".join(entries), example=EXAMPLE_ANSWER, task=task
    )


def build_critique_prompt(planner_prompt: str, answer: str) -> str:
    return f"{planner_prompt}\n{answer}\n{CRITERIA_TEXT}"


# -- parsing ---------------------------------------------------------------


def parse_plan(raw: str) -> Plan:
    """Extract and schema-check the first JSON object in ``raw``.

    Tolerates surrounding prose and code fences. Raises PlanParseError with
    (path, reason) pairs on failure; never raises anything else.
    """
    body = _extract_json(raw)
    if body is None:
        raise PlanParseError([("", "no JSON object found")])
    errors: list[tuple[str, str]] = []
    if not isinstance(body, dict):
        raise PlanParseError([("", "top level is not an object")])
    steps_raw = body.get("steps")
    if steps_raw is None:
        raise PlanParseError([("steps", "missing")])
    if not isinstance(steps_raw, list) or not steps_raw:
        raise PlanParseError([("steps", "must be a non-empty list")])
    steps: list[PlanStep] = []
    for idx, step_raw in enumerate(steps_raw):
        path = f"steps[{idx}]"
        if not isinstance(step_raw, dict):
            errors.append((path, "not an object"))
            continue
        model = step_raw.get("model")
        if not isinstance(model, str) or not model:
            errors.append((f"{path}.model", "missing or not a string"))
            continue
        inputs_raw = step_raw.get("inputs")
        if not isinstance(inputs_raw, list):
            errors.append((f"{path}.inputs", "missing or not a list"))
            continue
        bindings: list[Binding] = []
        for j, binding_raw in enumerate(inputs_raw):
            parsed = _parse_binding(binding_raw, idx)
            if isinstance(parsed, str) and parsed.startswith("!"):
                errors.append((f"{path}.inputs[{j}]", parsed[1:]))
            else:
                bindings.append(parsed)
        parameters = step_raw.get("parameters", {})
        if not isinstance(parameters, dict):
            errors.append((f"{path}.parameters", "not an object"))
            continue
        steps.append(PlanStep(model, tuple(bindings), dict(parameters)))
    if errors:
        raise PlanParseError(errors)
    consumed = set()
    for idx, step in enumerate(steps):
        for binding in step.inputs:
            if binding == "prev":
                if idx == 0:
                    raise PlanParseError([(f"steps[{idx}]", "first step cannot bind 'prev'")])
                consumed.add(idx - 1)
            elif isinstance(binding, int):
                consumed.add(binding)
    terminals = [i for i in range(len(steps)) if i not in consumed]
    if len(terminals) != 1:
        raise PlanParseError(
            [("steps", f"expected exactly one terminal step, found {len(terminals)}")]
        )
    return Plan(tuple(steps), raw_json=raw)


def _parse_binding(raw: Any, step_index: int) -> Binding | str:
    """A Binding, or an "!reason" string when the form is invalid."""
    if isinstance(raw, bool):
        return "!booleans are not bindings"
    if isinstance(raw, int):
        if not 0 <= raw < step_index:
            return f"!step index {raw} must be earlier than {step_index}"
        return raw
    if isinstance(raw, str):
        if raw == "prev":
            return "prev"
        match = _USER_BINDING_RE.match(raw)
        if match:
            try:
                return UserBinding(Base(match.group(1)))
            except ValueError:
                return f"!unknown input modality {match.group(1)!r}"
        return f"!expected 'prev', 'user:<modality>' or a step index, got {raw!r}"
    return f"!unsupported binding type {type(raw).__name__}"


def _extract_json(raw: str) -> Any | None:
    text = raw.strip()
    if text.startswith("```"):
        text = re.sub(r"^```[a-zA-Z]*\s*", "", text)
        text = re.sub(r"\s*```$", "", text)
    decoder = json.JSONDecoder()
    for start in range(len(text)):
        if text[start] != "{":
            continue
        try:
            value, _ = decoder.raw_decode(text, start)
            return value
        except json.JSONDecodeError:
            continue
    return None


# -- validation ------------------------------------------------------------


def validate_plan(plan: Plan, catalog: Catalog) -> ValidationReport:
    """Recompute criteria 2 and 3 for a parsed plan (criterion 4 holds)."""
    unknown: list[str] = []
    for idx, step in enumerate(plan.steps):
        if catalog.get(step.model) is None:
            unknown.append(f"steps[{idx}]: model {step.model!r} is not in the catalog")
    connect_problems: list[str] = []
    for idx, step in enumerate(plan.steps):
        spec = catalog.get(step.model)
        if spec is None:
            connect_problems.append(f"steps[{idx}]: cannot check wiring of unknown model")
            continue
        if len(step.inputs) != spec.arity:
            connect_problems.append(
                f"steps[{idx}]: {step.model} takes {spec.arity} input(s), plan gives {len(step.inputs)}"
            )
            continue
        for channel, binding in enumerate(step.inputs):
            source = _binding_modality(binding, idx, plan, catalog)
            if source is None:
                connect_problems.append(
                    f"steps[{idx}].inputs[{channel}]: source modality unknown"
                )
                continue
            target = spec.input_sockets[channel].modality
            if not compatible(source, target):
                connect_problems.append(
                    f"steps[{idx}].inputs[{channel}]: {source} cannot feed {target}"
                )
    return ValidationReport(
        models_known=CriterionResult(not unknown, tuple(unknown)),
        steps_connectable=CriterionResult(not connect_problems, tuple(connect_problems)),
        json_well_formed=CriterionResult(True),
    )


def report_for_parse_failure(error: PlanParseError) -> ValidationReport:
    details = tuple(f"{path}: {reason}" if path else reason for path, reason in error.errors)
    return ValidationReport(
        models_known=CriterionResult(False, ("not evaluated: no parseable plan",)),
        steps_connectable=CriterionResult(False, ("not evaluated: no parseable plan",)),
        json_well_formed=CriterionResult(False, details),
    )


def _binding_modality(
    binding: Binding, step_index: int, plan: Plan, catalog: Catalog
) -> Modality | None:
    if isinstance(binding, UserBinding):
        return Modality(binding.base)
    if binding == "prev":
        source_index = step_index - 1
    else:
        source_index = binding
    if not 0 <= source_index < len(plan.steps):
        return None
    source_spec = catalog.get(plan.steps[source_index].model)
    if source_spec is None:
        return None
    return source_spec.output_socket.modality


# -- materialization and the assist loop ------------------------------------

LAYOUT_GAP_X = PIECE_WIDTH * 1.25
LAYOUT_GAP_Y = PIECE_HEIGHT * 1.5


@dataclass
class AssistRound:
    answer: str
    report: ValidationReport
    plan: Plan | None = None

    def to_json(self) -> dict[str, Any]:
        return {"answer": self.answer, "report": self.report.to_json()}


@dataclass
class AssistResult:
    report: ValidationReport
    plan: Plan
    added_instances: list[str]
    rounds: list[AssistRound]


def materialize_plan(mosaic: Mosaic, plan: Plan, catalog: Catalog) -> list[str]:
    """Append the plan's pieces and wiring to the mosaic via edits.

    New pieces are laid out left to right on a fresh row below the lowest
    existing piece. Edits are rehearsed on a scratch copy first so a bad
    plan leaves the mosaic untouched.
    """
    edits = _plan_edits(mosaic, plan, catalog)
    rehearsal = mosaic.clone_graph()
    for edit in _plan_edits(rehearsal, plan, catalog):
        rehearsal.apply(edit)
    added = []
    for edit in edits:
        mosaic.apply(edit)
        if isinstance(edit, AddPiece):
            added.append(edit.instance_id)
    return added


def _plan_edits(mosaic: Mosaic, plan: Plan, catalog: Catalog) -> list:
    row_y = 0.0
    if mosaic.pieces:
        row_y = max(piece.position[1] for piece in mosaic.pieces.values()) + LAYOUT_GAP_Y
    edits: list = []
    column = 0
    planned_ids: list[str] = []
    next_id = mosaic._next_id

    def fresh_id() -> str:
        nonlocal next_id
        while True:
            candidate = f"p{next_id}"
            next_id += 1
            if candidate not in mosaic.pieces:
                return candidate

    def place(spec_id: str, parameters: dict[str, Any] | None = None) -> str:
        nonlocal column
        instance_id = fresh_id()
        edits.append(
            AddPiece(spec_id, (column * LAYOUT_GAP_X, row_y), parameters, instance_id)
        )
        column += 1
        return instance_id

    for idx, step in enumerate(plan.steps):
        spec = catalog.get(step.model)
        sources: list[str] = []
        for binding in step.inputs:
            if isinstance(binding, UserBinding):
                input_spec = catalog.input_spec_for(binding.base)
                sources.append(place(input_spec.spec_id))
            elif binding == "prev":
                sources.append(planned_ids[idx - 1])
            else:
                sources.append(planned_ids[binding])
        instance_id = place(spec.spec_id, step.parameters or None)
        planned_ids.append(instance_id)
        for channel, source in enumerate(sources):
            edits.append(Connect(source, instance_id, channel))
    return edits


def assist(
    task: str,
    catalog: Catalog,
    client: CompletionClient,
    mosaic: Mosaic,
) -> AssistResult:
    """Plan, self-critique once, validate by machine, and place the result.

    The critique round is issued unconditionally. The corrected answer wins
    when it passes the machine criteria; otherwise a passing first answer is
    used. If neither round passes, UnrepairablePlan carries both reports and
    the mosaic is left untouched.
    """
    prompt = build_planner_prompt(catalog, task)
    rounds: list[AssistRound] = []

    def evaluate(answer: str) -> AssistRound:
        try:
            plan = parse_plan(answer)
        except PlanParseError as exc:
            return AssistRound(answer, report_for_parse_failure(exc))
        return AssistRound(answer, validate_plan(plan, catalog), plan)

    first_answer = client.complete(prompt)
    rounds.append(evaluate(first_answer))
    critique = build_critique_prompt(prompt, first_answer)
    rounds.append(evaluate(client.complete(critique)))

    chosen = next(
        (r for r in (rounds[1], rounds[0]) if r.plan is not None and r.report.machine_ok),
        None,
    )
    if chosen is None:
        raise UnrepairablePlan(rounds)
    added = materialize_plan(mosaic, chosen.plan, catalog)
    return AssistResult(chosen.report, chosen.plan, added, rounds)
