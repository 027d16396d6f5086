// Workspace view state: the loaded document, local editing with undo/redo,
// selection, per-input bindings, and the active run folded from its events.

import { CompatTable } from './compat.js';
import type {
  Connection,
  MosaicDocument,
  MosaicGraph,
  PieceInstance,
  RunEntry,
  RunEventBody,
  RunInputBinding,
  RunRecordBody,
} from './types.js';

export interface RunView {
  runId: string;
  status: 'running' | 'done' | 'failed';
  entries: Record<string, Pick<RunEntry, 'status' | 'output'>>;
}

/** Pure fold of the event stream into a displayable run view. */
export function foldRunEvent(view: RunView, event: RunEventBody): RunView {
  const entries = { ...view.entries };
  let status = view.status;
  if (event.kind === 'piece_started' && event.instance_id) {
    entries[event.instance_id] = { status: 'running', output: null };
  } else if (event.kind === 'piece_done' && event.instance_id) {
    entries[event.instance_id] = {
      status: 'done',
      output:
        event.modality && event.output_hash
          ? { modality: event.modality, format: '', hash: event.output_hash, text: null }
          : null,
    };
  } else if (event.kind === 'piece_failed' && event.instance_id) {
    entries[event.instance_id] = { status: 'failed', output: null };
  } else if (event.kind === 'run_done') {
    status = event.status === 'done' ? 'done' : 'failed';
  }
  return { runId: view.runId, status, entries };
}

export function runViewFromRecord(record: RunRecordBody): RunView {
  const entries: RunView['entries'] = {};
  for (const [pid, entry] of Object.entries(record.entries)) {
    entries[pid] = { status: entry.status, output: entry.output };
  }
  return { runId: record.run_id, status: record.status, entries };
}

const UNDO_DEPTH = 100;

export class WorkspaceState {
  doc: MosaicDocument;
  table: CompatTable;
  selection = new Set<string>();
  inputBindings = new Map<string, RunInputBinding>();
  run: RunView | null = null;
  private undoStack: MosaicGraph[] = [];
  private redoStack: MosaicGraph[] = [];
  private nextLocalId = 1;
  onChange: () => void = () => {};

  constructor(doc: MosaicDocument, table: CompatTable) {
    this.doc = doc;
    this.table = table;
    this.bumpLocalId();
  }

  private bumpLocalId(): void {
    for (const piece of this.doc.mosaic.pieces) {
      const match = /^p(\d+)$/.exec(piece.instance_id);
      if (match) this.nextLocalId = Math.max(this.nextLocalId, Number(match[1]) + 1);
    }
  }

  graph(): MosaicGraph {
    return this.doc.mosaic;
  }

  piece(instanceId: string): PieceInstance | undefined {
    return this.doc.mosaic.pieces.find((p) => p.instance_id === instanceId);
  }

  occupiedInputs(): Set<string> {
    return new Set(this.doc.mosaic.connections.map((c) => `${c.to}:${c.channel}`));
  }

  private snapshot(): MosaicGraph {
    return JSON.parse(JSON.stringify(this.doc.mosaic)) as MosaicGraph;
  }

  private commit(mutate: (graph: MosaicGraph) => boolean): boolean {
    const before = this.snapshot();
    const changed = mutate(this.doc.mosaic);
    if (!changed) return false;
    this.undoStack.push(before);
    if (this.undoStack.length > UNDO_DEPTH) this.undoStack.shift();
    this.redoStack = [];
    this.onChange();
    return true;
  }

  undo(): boolean {
    const previous = this.undoStack.pop();
    if (!previous) return false;
    this.redoStack.push(this.snapshot());
    this.doc.mosaic = previous;
    this.selection = new Set(
      [...this.selection].filter((id) => this.piece(id) !== undefined),
    );
    this.onChange();
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (!next) return false;
    this.undoStack.push(this.snapshot());
    this.doc.mosaic = next;
    this.onChange();
    return true;
  }

  addPiece(specId: string, position: [number, number]): PieceInstance {
    const spec = this.table.spec(specId);
    const defaults: Record<string, unknown> = {};
    for (const parameter of spec.parameters) defaults[parameter.name] = parameter.default;
    const piece: PieceInstance = {
      instance_id: `p${this.nextLocalId++}`,
      spec_id: specId,
      position,
      parameters: defaults,
    };
    this.commit((graph) => {
      graph.pieces.push(piece);
      return true;
    });
    return piece;
  }

  duplicatePiece(instanceId: string): PieceInstance | null {
    const original = this.piece(instanceId);
    if (!original) return null;
    const copy: PieceInstance = {
      instance_id: `p${this.nextLocalId++}`,
      spec_id: original.spec_id,
      position: [original.position[0] + 24, original.position[1] + 24],
      parameters: { ...original.parameters },
    };
    this.commit((graph) => {
      graph.pieces.push(copy);
      return true;
    });
    return copy;
  }

  removePieces(instanceIds: string[]): void {
    const doomed = new Set(instanceIds);
    this.commit((graph) => {
      const before = graph.pieces.length;
      graph.pieces = graph.pieces.filter((p) => !doomed.has(p.instance_id));
      graph.connections = graph.connections.filter(
        (c) => !doomed.has(c.from) && !doomed.has(c.to),
      );
      return graph.pieces.length !== before;
    });
    for (const id of instanceIds) this.selection.delete(id);
  }

  movePieces(moves: Map<string, [number, number]>): void {
    this.commit((graph) => {
      let changed = false;
      for (const piece of graph.pieces) {
        const target = moves.get(piece.instance_id);
        if (target) {
          piece.position = target;
          changed = true;
        }
      }
      return changed;
    });
  }

  /** Mirrors server rules: compatible, channel open, acyclic. */
  connect(from: string, to: string, channel: number): boolean {
    const fromPiece = this.piece(from);
    const toPiece = this.piece(to);
    if (!fromPiece || !toPiece || from === to) return false;
    if (!this.table.canConnect(fromPiece.spec_id, toPiece.spec_id, channel)) return false;
    if (this.occupiedInputs().has(`${to}:${channel}`)) return false;
    if (this.reaches(to, from)) return false;
    return this.commit((graph) => {
      graph.connections.push({ from, to, channel });
      return true;
    });
  }

  disconnect(connection: Connection): void {
    this.commit((graph) => {
      const before = graph.connections.length;
      graph.connections = graph.connections.filter(
        (c) =>
          !(c.from === connection.from && c.to === connection.to && c.channel === connection.channel),
      );
      return graph.connections.length !== before;
    });
  }

  setParameter(instanceId: string, name: string, value: unknown): void {
    this.commit((graph) => {
      const piece = graph.pieces.find((p) => p.instance_id === instanceId);
      if (!piece) return false;
      piece.parameters = { ...piece.parameters, [name]: value };
      return true;
    });
  }

  private reaches(start: string, goal: string): boolean {
    const frontier = [start];
    const seen = new Set(frontier);
    while (frontier.length) {
      const node = frontier.pop()!;
      if (node === goal) return true;
      for (const connection of this.doc.mosaic.connections) {
        if (connection.from === node && !seen.has(connection.to)) {
          seen.add(connection.to);
          frontier.push(connection.to);
        }
      }
    }
    return false;
  }

  /** Weakly connected components in stable order; mirrors the server's chain ids. */
  chains(): string[][] {
    const order = new Map(this.doc.mosaic.pieces.map((p, i) => [p.instance_id, i]));
    const neighbours = new Map<string, Set<string>>();
    for (const piece of this.doc.mosaic.pieces) neighbours.set(piece.instance_id, new Set());
    for (const connection of this.doc.mosaic.connections) {
      neighbours.get(connection.from)?.add(connection.to);
      neighbours.get(connection.to)?.add(connection.from);
    }
    const seen = new Set<string>();
    const components: string[][] = [];
    const sorted = [...this.doc.mosaic.pieces].sort(
      (a, b) => order.get(a.instance_id)! - order.get(b.instance_id)!,
    );
    for (const piece of sorted) {
      if (seen.has(piece.instance_id)) continue;
      const component: string[] = [];
      const frontier = [piece.instance_id];
      seen.add(piece.instance_id);
      while (frontier.length) {
        const node = frontier.pop()!;
        component.push(node);
        for (const other of neighbours.get(node) ?? []) {
          if (!seen.has(other)) {
            seen.add(other);
            frontier.push(other);
          }
        }
      }
      components.push(component);
    }
    return components;
  }

  chainIdOf(instanceId: string): number {
    return this.chains().findIndex((chain) => chain.includes(instanceId));
  }
}
