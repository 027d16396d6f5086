"""Exception hierarchy shared across the workspace."""

from __future__ import annotations


class MosaicStudioError(Exception):
    """Base class for all package errors."""

    code = "error"


class UnknownSpec(MosaicStudioError):
    code = "unknown_spec"


class UnknownInstance(MosaicStudioError):
    code = "unknown_instance"


class IncompatibleConnection(MosaicStudioError):
    code = "incompatible_connection"


class CycleWouldForm(MosaicStudioError):
    code = "cycle"


class OccupiedInputChannel(MosaicStudioError):
    code = "occupied_input_channel"


class ParameterOutOfBounds(MosaicStudioError):
    code = "parameter_out_of_bounds"


class NothingToUndo(MosaicStudioError):
    code = "nothing_to_undo"


class NothingToRedo(MosaicStudioError):
    code = "nothing_to_redo"


class InvalidMosaic(MosaicStudioError):
    """Raised when an operation requires a mosaic that validates cleanly."""

    code = "invalid_mosaic"

    def __init__(self, violations):
        super().__init__(f"{len(violations)} violation(s)")
        self.violations = violations


class EmptyQuery(MosaicStudioError):
    code = "empty_query"


class EmptyInput(MosaicStudioError):
    code = "empty_input"


class EmptyTask(MosaicStudioError):
    code = "empty_task"


class ClientError(MosaicStudioError):
    """LLM completion client failure; carries the rendered prompt for debugging."""

    code = "client_error"

    def __init__(self, message: str, prompt: str = ""):
        super().__init__(message)
        self.prompt = prompt


class ClientTimeout(ClientError):
    code = "client_timeout"


class MissingInput(MosaicStudioError):
    code = "missing_input"

    def __init__(self, instance_id: str, message: str = ""):
        super().__init__(message or f"no input bound for {instance_id}")
        self.instance_id = instance_id


class AdapterFailure(MosaicStudioError):
    code = "adapter_failure"

    def __init__(self, instance_id: str, cause: str):
        super().__init__(f"{instance_id}: {cause}")
        self.instance_id = instance_id
        self.cause = cause


class PieceTimeout(MosaicStudioError):
    code = "timeout"

    def __init__(self, instance_id: str, seconds: float):
        super().__init__(f"{instance_id}: exceeded {seconds:g}s")
        self.instance_id = instance_id


class NotYetComputed(MosaicStudioError):
    code = "not_yet_computed"


class PieceFailed(MosaicStudioError):
    code = "piece_failed"


class NotReachable(MosaicStudioError):
    code = "not_reachable"


class NotFound(MosaicStudioError):
    code = "not_found"


class VersionTooNew(MosaicStudioError):
    code = "version_too_new"


class VersionConflict(MosaicStudioError):
    code = "version_conflict"


class CorruptDocument(MosaicStudioError):
    code = "corrupt_document"


class PlanParseError(MosaicStudioError):
    """Plan text could not be turned into a plan; carries structured errors."""

    code = "plan_parse_error"

    def __init__(self, errors):
        super().__init__("; ".join(f"{path}: {reason}" for path, reason in errors))
        self.errors = list(errors)


class UnrepairablePlan(MosaicStudioError):
    """Both planner rounds failed machine validation; carries both reports."""

    code = "unrepairable_plan"

    def __init__(self, rounds):
        super().__init__(f"no valid plan after {len(rounds)} round(s)")
        self.rounds = list(rounds)
