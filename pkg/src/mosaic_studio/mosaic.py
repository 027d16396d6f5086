"""The assembly-canvas graph and its reversible edit operations.

A mosaic owns piece instances, connections, and an edit journal with a
cursor for undo/redo. Every edit validates before mutating, so a mosaic
reached through ``apply`` alone always passes ``validate`` — the canvas
cannot hold an ill-typed or cyclic wiring, mirroring the snap/repel
behavior of the UI.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, NamedTuple

from .errors import (
    CycleWouldForm,
    IncompatibleConnection,
    NothingToRedo,
    NothingToUndo,
    OccupiedInputChannel,
    ParameterOutOfBounds,
    UnknownInstance,
    UnknownSpec,
)
from .modality import compatible
from .pieces import Connection, PieceInstance, PieceSpec

if TYPE_CHECKING:
    from .catalog import Catalog

# Canvas geometry in abstract units, origin top-left. The snap radius is
# 1.5x the piece height; core and UI must agree on these constants.
PIECE_WIDTH = 160.0
PIECE_HEIGHT = 80.0
SNAP_RADIUS = 1.5 * PIECE_HEIGHT
DUPLICATE_OFFSET = (24.0, 24.0)


@dataclass(frozen=True)
class Violation:
    """One machine-readable problem found by validation."""

    code: str
    message: str
    instance_id: str | None = None
    connection: Connection | None = None
    parameter: str | None = None

    def to_json(self) -> dict[str, Any]:
        body: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.instance_id is not None:
            body["instance_id"] = self.instance_id
        if self.connection is not None:
            body["connection"] = {
                "from": self.connection.from_instance,
                "to": self.connection.to_instance,
                "channel": self.connection.to_channel,
            }
        if self.parameter is not None:
            body["parameter"] = self.parameter
        return body


def socket_position(
    piece_pos: tuple[float, float], *, output: bool, channel: int = 0, arity: int = 1
) -> tuple[float, float]:
    """Canvas position of a socket for a piece placed at ``piece_pos`` (top-left)."""
    x, y = piece_pos
    if output:
        return (x + PIECE_WIDTH, y + PIECE_HEIGHT / 2)
    return (x, y + PIECE_HEIGHT * (channel + 1) / (arity + 1))


class SnapCandidate(NamedTuple):
    """Nearest open, compatible socket for a dragged spec.

    ``channel`` is always the consuming input channel of the connection that
    would form; ``dragged_is_producer`` says which side consumes (False means
    the target's output would feed the dragged piece's input ``channel``).
    """

    target_instance: str
    channel: int
    dragged_is_producer: bool
    distance: float


class Chain(NamedTuple):
    """One weakly connected component, pieces in topological order."""

    chain_id: int
    piece_ids: tuple[str, ...]
    connections: tuple[Connection, ...]


class Edit:
    """Base class for reversible edit commands.

    ``apply`` either fully mutates the mosaic or raises, leaving it intact.
    Edits capture whatever they need on first apply (assigned ids, removed
    state) so that journal replay and redo are deterministic.
    """

    def apply(self, mosaic: "Mosaic") -> None:
        raise NotImplementedError

    def revert(self, mosaic: "Mosaic") -> None:
        raise NotImplementedError

    def describe(self) -> dict[str, Any]:
        return {"edit": type(self).__name__}


@dataclass
class AddPiece(Edit):
    spec_id: str
    position: tuple[float, float]
    parameters: dict[str, Any] | None = None
    instance_id: str | None = None  # assigned on first apply

    def apply(self, mosaic: "Mosaic") -> None:
        spec = mosaic.catalog.get(self.spec_id)
        if spec is None:
            raise UnknownSpec(self.spec_id)
        values = spec.default_parameters()
        if self.parameters:
            problems = spec.check_parameters(self.parameters)
            if problems:
                raise ParameterOutOfBounds("; ".join(p for _, p in problems))
            values.update(self.parameters)
        if self.instance_id is None:
            self.instance_id = mosaic.next_instance_id()
        elif self.instance_id in mosaic.pieces:
            raise UnknownInstance(f"{self.instance_id} already exists")
        mosaic._insert(PieceInstance(self.instance_id, spec.spec_id, self.position, values))

    def revert(self, mosaic: "Mosaic") -> None:
        mosaic._remove(self.instance_id)


@dataclass
class RemovePiece(Edit):
    instance_id: str
    _removed: PieceInstance | None = field(default=None, repr=False)
    _severed: tuple[Connection, ...] = field(default=(), repr=False)
    _insert_index: int = field(default=0, repr=False)

    def apply(self, mosaic: "Mosaic") -> None:
        piece = mosaic.pieces.get(self.instance_id)
        if piece is None:
            raise UnknownInstance(self.instance_id)
        self._removed = piece
        self._severed = tuple(
            c
            for c in mosaic.connections
            if self.instance_id in (c.from_instance, c.to_instance)
        )
        self._insert_index = mosaic._order[self.instance_id]
        for conn in self._severed:
            mosaic.connections.remove(conn)
        mosaic._remove(self.instance_id)

    def revert(self, mosaic: "Mosaic") -> None:
        mosaic._insert(self._removed, order=self._insert_index)
        mosaic.connections.extend(self._severed)


@dataclass
class MovePieces(Edit):
    new_positions: dict[str, tuple[float, float]]
    _old_positions: dict[str, tuple[float, float]] = field(default_factory=dict, repr=False)

    def apply(self, mosaic: "Mosaic") -> None:
        for instance_id in self.new_positions:
            if instance_id not in mosaic.pieces:
                raise UnknownInstance(instance_id)
        self._old_positions = {
            instance_id: mosaic.pieces[instance_id].position
            for instance_id in self.new_positions
        }
        for instance_id, pos in self.new_positions.items():
            mosaic.pieces[instance_id].position = (float(pos[0]), float(pos[1]))

    def revert(self, mosaic: "Mosaic") -> None:
        for instance_id, pos in self._old_positions.items():
            mosaic.pieces[instance_id].position = pos


@dataclass
class DuplicatePiece(Edit):
    instance_id: str
    offset: tuple[float, float] = DUPLICATE_OFFSET
    new_instance_id: str | None = None  # assigned on first apply

    def apply(self, mosaic: "Mosaic") -> None:
        piece = mosaic.pieces.get(self.instance_id)
        if piece is None:
            raise UnknownInstance(self.instance_id)
        if self.new_instance_id is None:
            self.new_instance_id = mosaic.next_instance_id()
        position = (piece.position[0] + self.offset[0], piece.position[1] + self.offset[1])
        mosaic._insert(piece.clone(self.new_instance_id, position))

    def revert(self, mosaic: "Mosaic") -> None:
        mosaic._remove(self.new_instance_id)


@dataclass
class Connect(Edit):
    from_instance: str
    to_instance: str
    to_channel: int = 0

    def apply(self, mosaic: "Mosaic") -> None:
        src = mosaic.pieces.get(self.from_instance)
        dst = mosaic.pieces.get(self.to_instance)
        if src is None:
            raise UnknownInstance(self.from_instance)
        if dst is None:
            raise UnknownInstance(self.to_instance)
        src_spec = mosaic.catalog.get(src.spec_id)
        dst_spec = mosaic.catalog.get(dst.spec_id)
        if src_spec is None or dst_spec is None:
            raise UnknownSpec(src.spec_id if src_spec is None else dst.spec_id)
        if not 0 <= self.to_channel < dst_spec.arity:
            raise IncompatibleConnection(
                f"{dst.spec_id} has no input channel {self.to_channel}"
            )
        if any(
            c.to_instance == self.to_instance and c.to_channel == self.to_channel
            for c in mosaic.connections
        ):
            raise OccupiedInputChannel(f"{self.to_instance}[{self.to_channel}]")
        out_mod = src_spec.output_socket.modality
        in_mod = dst_spec.input_sockets[self.to_channel].modality
        if not compatible(out_mod, in_mod):
            raise IncompatibleConnection(f"{out_mod} cannot feed {in_mod}")
        if self.from_instance == self.to_instance or mosaic.reaches(
            self.to_instance, self.from_instance
        ):
            raise CycleWouldForm(f"{self.from_instance} -> {self.to_instance}")
        mosaic.connections.append(
            Connection(self.from_instance, self.to_instance, self.to_channel)
        )

    def revert(self, mosaic: "Mosaic") -> None:
        mosaic.connections.remove(
            Connection(self.from_instance, self.to_instance, self.to_channel)
        )


@dataclass
class Disconnect(Edit):
    from_instance: str
    to_instance: str
    to_channel: int = 0

    def apply(self, mosaic: "Mosaic") -> None:
        conn = Connection(self.from_instance, self.to_instance, self.to_channel)
        if conn not in mosaic.connections:
            raise UnknownInstance(f"no connection {conn}")
        mosaic.connections.remove(conn)

    def revert(self, mosaic: "Mosaic") -> None:
        mosaic.connections.append(
            Connection(self.from_instance, self.to_instance, self.to_channel)
        )


@dataclass
class SetParameter(Edit):
    instance_id: str
    name: str
    value: Any
    _old_value: Any = field(default=None, repr=False)

    def apply(self, mosaic: "Mosaic") -> None:
        piece = mosaic.pieces.get(self.instance_id)
        if piece is None:
            raise UnknownInstance(self.instance_id)
        spec = mosaic.catalog.get(piece.spec_id)
        if spec is None:
            raise UnknownSpec(piece.spec_id)
        schema = spec.parameter(self.name)
        if schema is None:
            raise ParameterOutOfBounds(f"unknown parameter {self.name!r}")
        problem = schema.check(self.value)
        if problem is not None:
            raise ParameterOutOfBounds(f"parameter {self.name!r}: {problem}")
        self._old_value = piece.parameters.get(self.name)
        piece.parameters[self.name] = self.value

    def revert(self, mosaic: "Mosaic") -> None:
        mosaic.pieces[self.instance_id].parameters[self.name] = self._old_value


class Mosaic:
    """Piece instances plus connections, with a journaled edit history."""

    def __init__(self, catalog: "Catalog"):
        self.catalog = catalog
        self.pieces: dict[str, PieceInstance] = {}
        self.connections: list[Connection] = []
        self.journal: list[Edit] = []
        self.cursor = 0
        self._next_id = 1
        self._order: dict[str, int] = {}
        self._next_order = 0

    # -- bookkeeping -------------------------------------------------------

    def next_instance_id(self) -> str:
        while True:
            candidate = f"p{self._next_id}"
            self._next_id += 1
            if candidate not in self.pieces:
                return candidate

    def _insert(self, piece: PieceInstance, order: int | None = None) -> None:
        self.pieces[piece.instance_id] = piece
        if order is None:
            order = self._next_order
            self._next_order += 1
        self._order[piece.instance_id] = order

    def _remove(self, instance_id: str) -> None:
        del self.pieces[instance_id]
        del self._order[instance_id]

    def reaches(self, start: str, goal: str) -> bool:
        """Whether ``goal`` is reachable from ``start`` along connections."""
        frontier = [start]
        seen = {start}
        while frontier:
            node = frontier.pop()
            if node == goal:
                return True
            for conn in self.connections:
                if conn.from_instance == node and conn.to_instance not in seen:
                    seen.add(conn.to_instance)
                    frontier.append(conn.to_instance)
        return False

    def producers(self, instance_id: str) -> dict[int, str]:
        """Map of input channel -> producing instance for one piece."""
        return {
            c.to_channel: c.from_instance
            for c in self.connections
            if c.to_instance == instance_id
        }

    # -- editing -----------------------------------------------------------

    def apply(self, edit: Edit) -> Edit:
        edit.apply(self)
        del self.journal[self.cursor :]
        self.journal.append(edit)
        self.cursor += 1
        return edit

    def undo(self) -> None:
        if self.cursor == 0:
            raise NothingToUndo()
        self.cursor -= 1
        self.journal[self.cursor].revert(self)

    def redo(self) -> None:
        if self.cursor >= len(self.journal):
            raise NothingToRedo()
        self.journal[self.cursor].apply(self)
        self.cursor += 1

    def replay(self) -> "Mosaic":
        """Re-run the journal up to the cursor on a fresh mosaic."""
        fresh = Mosaic(self.catalog)
        for edit in self.journal[: self.cursor]:
            fresh.apply(edit)
        return fresh

    # -- state views -------------------------------------------------------

    def graph_state(self) -> dict[str, Any]:
        """Canonical graph snapshot (pieces, positions, parameters, wiring)."""
        return {
            "pieces": {
                pid: {
                    "spec_id": piece.spec_id,
                    "position": (piece.position[0], piece.position[1]),
                    "parameters": dict(piece.parameters),
                }
                for pid, piece in sorted(self.pieces.items())
            },
            "connections": sorted(
                (c.from_instance, c.to_instance, c.to_channel) for c in self.connections
            ),
        }

    def clone_graph(self) -> "Mosaic":
        """Copy of the current graph state with an empty journal."""
        twin = Mosaic(self.catalog)
        for pid in sorted(self.pieces, key=lambda p: self._order[p]):
            piece = self.pieces[pid]
            twin._insert(piece.clone(pid, piece.position))
        twin.connections = list(self.connections)
        twin._next_id = self._next_id
        return twin

    # -- validation --------------------------------------------------------

    def validate(self) -> list[Violation]:
        """All structural, typing, bound, and acyclicity problems."""
        violations: list[Violation] = []
        for pid, piece in self.pieces.items():
            spec = self.catalog.get(piece.spec_id)
            if spec is None:
                violations.append(
                    Violation("unknown_spec", f"{piece.spec_id!r} not in catalog", instance_id=pid)
                )
                continue
            for name, problem in spec.check_parameters(piece.parameters):
                violations.append(
                    Violation("parameter_out_of_bounds", problem, instance_id=pid, parameter=name)
                )
        taken: set[tuple[str, int]] = set()
        for conn in self.connections:
            src = self.pieces.get(conn.from_instance)
            dst = self.pieces.get(conn.to_instance)
            if src is None or dst is None:
                violations.append(
                    Violation("unknown_instance", "connection endpoint missing", connection=conn)
                )
                continue
            src_spec = self.catalog.get(src.spec_id)
            dst_spec = self.catalog.get(dst.spec_id)
            if src_spec is None or dst_spec is None:
                continue  # already reported as unknown_spec
            if not 0 <= conn.to_channel < dst_spec.arity:
                violations.append(
                    Violation("bad_channel", f"no input channel {conn.to_channel}", connection=conn)
                )
                continue
            key = (conn.to_instance, conn.to_channel)
            if key in taken:
                violations.append(
                    Violation("occupied_input_channel", "two producers for one input", connection=conn)
                )
            taken.add(key)
            out_mod = src_spec.output_socket.modality
            in_mod = dst_spec.input_sockets[conn.to_channel].modality
            if not compatible(out_mod, in_mod):
                violations.append(
                    Violation(
                        "incompatible_connection",
                        f"{out_mod} cannot feed {in_mod}",
                        connection=conn,
                    )
                )
        violations.extend(self._cycle_violations())
        return violations

    def _cycle_violations(self) -> list[Violation]:
        indegree = {pid: 0 for pid in self.pieces}
        for conn in self.connections:
            if conn.from_instance in self.pieces and conn.to_instance in self.pieces:
                indegree[conn.to_instance] += 1
        queue = [pid for pid, deg in indegree.items() if deg == 0]
        visited = 0
        while queue:
            node = queue.pop()
            visited += 1
            for conn in self.connections:
                if conn.from_instance == node and conn.to_instance in indegree:
                    indegree[conn.to_instance] -= 1
                    if indegree[conn.to_instance] == 0:
                        queue.append(conn.to_instance)
        if visited < len(self.pieces):
            stuck = sorted(pid for pid, deg in indegree.items() if deg > 0)
            return [Violation("cycle", f"cycle through {', '.join(stuck)}")]
        return []

    # -- chains ------------------------------------------------------------

    def chains(self) -> list[Chain]:
        """Weakly connected components, each topologically ordered.

        Components are numbered by the earliest-added piece they contain, and
        the order within a chain is deterministic (insertion order among
        ready pieces), so chain ids are stable across runs.
        """
        violations = self.validate()
        if violations:
            from .errors import InvalidMosaic

            raise InvalidMosaic(violations)
        neighbours: dict[str, set[str]] = {pid: set() for pid in self.pieces}
        for conn in self.connections:
            neighbours[conn.from_instance].add(conn.to_instance)
            neighbours[conn.to_instance].add(conn.from_instance)
        seen: set[str] = set()
        components: list[list[str]] = []
        for pid in sorted(self.pieces, key=lambda p: self._order[p]):
            if pid in seen:
                continue
            component = []
            frontier = [pid]
            seen.add(pid)
            while frontier:
                node = frontier.pop()
                component.append(node)
                for other in neighbours[node]:
                    if other not in seen:
                        seen.add(other)
                        frontier.append(other)
            components.append(component)
        chains = []
        for idx, component in enumerate(components):
            members = set(component)
            conns = tuple(
                c for c in self.connections if c.from_instance in members
            )
            ordered = self._topo_order(component, conns)
            chains.append(Chain(idx, tuple(ordered), conns))
        return chains

    def _topo_order(self, members: list[str], conns: tuple[Connection, ...]) -> list[str]:
        indegree = {pid: 0 for pid in members}
        for conn in conns:
            indegree[conn.to_instance] += 1
        ready = sorted(
            (pid for pid, deg in indegree.items() if deg == 0),
            key=lambda p: self._order[p],
        )
        ordered: list[str] = []
        while ready:
            node = ready.pop(0)
            ordered.append(node)
            freed = []
            for conn in conns:
                if conn.from_instance == node:
                    indegree[conn.to_instance] -= 1
                    if indegree[conn.to_instance] == 0:
                        freed.append(conn.to_instance)
            ready = sorted(ready + freed, key=lambda p: self._order[p])
        return ordered

    # -- snapping ----------------------------------------------------------

    def snap_candidates(
        self, dragged_spec: PieceSpec, position: tuple[float, float]
    ) -> SnapCandidate | None:
        """Nearest open, compatible socket within the snap radius.

        ``position`` is the dragged piece's would-be top-left. Incompatible
        sockets are never returned (they repel); ties break on the lowest
        target instance id.
        """
        best: SnapCandidate | None = None

        def consider(candidate: SnapCandidate) -> None:
            nonlocal best
            if candidate.distance > SNAP_RADIUS:
                return
            if best is None or (candidate.distance, candidate.target_instance) < (
                best.distance,
                best.target_instance,
            ):
                best = candidate

        for pid, piece in self.pieces.items():
            spec = self.catalog.get(piece.spec_id)
            if spec is None:
                continue
            # Their output feeding one of the dragged piece's inputs.
            out_pos = socket_position(piece.position, output=True)
            for sock in dragged_spec.input_sockets:
                if not compatible(spec.output_socket.modality, sock.modality):
                    continue
                in_pos = socket_position(
                    position, output=False, channel=sock.channel, arity=dragged_spec.arity
                )
                consider(
                    SnapCandidate(pid, sock.channel, False, _dist(out_pos, in_pos))
                )
            # The dragged piece's output feeding one of their open inputs.
            occupied = self.producers(pid)
            for sock in spec.input_sockets:
                if sock.channel in occupied:
                    continue
                if not compatible(dragged_spec.output_socket.modality, sock.modality):
                    continue
                in_pos = socket_position(
                    piece.position, output=False, channel=sock.channel, arity=spec.arity
                )
                out_pos_dragged = socket_position(position, output=True)
                consider(
                    SnapCandidate(pid, sock.channel, True, _dist(in_pos, out_pos_dragged))
                )
        return best


def _dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    return ((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2) ** 0.5
