// Compatibility and geometry mirrored client-side for responsive dragging.
// The socket table is generated from the served catalog (never hand-written);
// the server remains authoritative on save.

import type { CatalogDocument, PieceSpec } from './types.js';

export const PIECE_WIDTH = 160;
export const PIECE_HEIGHT = 80;
export const SNAP_RADIUS = 1.5 * PIECE_HEIGHT;

export interface Modality {
  base: string;
  refinement: string | null;
}

export function parseModality(text: string): Modality {
  const match = /^([a-z0-9_]+)(?:\(([a-z_]+)\))?$/.exec(text);
  if (!match) throw new Error(`malformed modality: ${text}`);
  return { base: match[1], refinement: match[2] ?? null };
}

/** An output feeds an input when bases match and the input is unrefined or refined identically. */
export function compatible(out: string, into: string): boolean {
  const a = parseModality(out);
  const b = parseModality(into);
  if (a.base !== b.base) return false;
  if (b.refinement === null) return true;
  return a.refinement === b.refinement;
}

const BASE_COLORS = ['#7cb342', '#1e88e5', '#8e24aa', '#3949ab', '#e53935', '#fb8c00'];

export class CompatTable {
  private specs = new Map<string, PieceSpec>();
  readonly colors = new Map<string, string>();

  constructor(catalog: CatalogDocument) {
    for (const spec of catalog.specs) this.specs.set(spec.spec_id, spec);
    // one fixed color per base modality, assigned in catalog discovery order
    for (const spec of catalog.specs) {
      for (const modality of [...spec.inputs, spec.output]) {
        const base = parseModality(modality).base;
        if (!this.colors.has(base)) {
          this.colors.set(base, BASE_COLORS[this.colors.size % BASE_COLORS.length]);
        }
      }
    }
  }

  spec(specId: string): PieceSpec {
    const spec = this.specs.get(specId);
    if (!spec) throw new Error(`unknown spec ${specId}`);
    return spec;
  }

  maybeSpec(specId: string): PieceSpec | undefined {
    return this.specs.get(specId);
  }

  colorOf(modality: string): string {
    return this.colors.get(parseModality(modality).base) ?? '#888';
  }

  canConnect(fromSpecId: string, toSpecId: string, channel: number): boolean {
    const from = this.specs.get(fromSpecId);
    const to = this.specs.get(toSpecId);
    if (!from || !to || channel >= to.inputs.length) return false;
    return compatible(from.output, to.inputs[channel]);
  }
}

export function socketPosition(
  piecePos: [number, number],
  side: 'output' | 'input',
  channel = 0,
  arity = 1,
): [number, number] {
  const [x, y] = piecePos;
  if (side === 'output') return [x + PIECE_WIDTH, y + PIECE_HEIGHT / 2];
  return [x, y + (PIECE_HEIGHT * (channel + 1)) / (arity + 1)];
}

export interface SnapCandidate {
  targetInstance: string;
  channel: number;
  draggedIsProducer: boolean;
  distance: number;
}

/** Distance to the nearest socket pairing regardless of compatibility; used to
 * tell "tried to force a fit" (repel) apart from "dropped in open space". */
export function nearestSocketDistance(
  table: CompatTable,
  pieces: PlacedPiece[],
  draggedSpecId: string,
  position: [number, number],
): number | null {
  const dragged = table.maybeSpec(draggedSpecId);
  if (!dragged) return null;
  let best: number | null = null;
  const consider = (distance: number) => {
    if (best === null || distance < best) best = distance;
  };
  for (const piece of pieces) {
    const spec = table.maybeSpec(piece.spec_id);
    if (!spec) continue;
    const theirOut = socketPosition(piece.position, 'output');
    dragged.inputs.forEach((_, channel) => {
      const myIn = socketPosition(position, 'input', channel, dragged.inputs.length);
      consider(Math.hypot(theirOut[0] - myIn[0], theirOut[1] - myIn[1]));
    });
    spec.inputs.forEach((_, channel) => {
      const theirIn = socketPosition(piece.position, 'input', channel, spec.inputs.length);
      const myOut = socketPosition(position, 'output');
      consider(Math.hypot(theirIn[0] - myOut[0], theirIn[1] - myOut[1]));
    });
  }
  return best;
}

export interface PlacedPiece {
  instance_id: string;
  spec_id: string;
  position: [number, number];
}

/** Nearest open compatible socket for a dragged spec; incompatible sockets repel (never returned). */
export function snapCandidate(
  table: CompatTable,
  pieces: PlacedPiece[],
  occupied: Set<string>, // "instance:channel" keys
  draggedSpecId: string,
  position: [number, number],
): SnapCandidate | null {
  const dragged = table.maybeSpec(draggedSpecId);
  if (!dragged) return null;
  let best: SnapCandidate | null = null;

  const consider = (candidate: SnapCandidate) => {
    if (candidate.distance > SNAP_RADIUS) return;
    if (
      best === null ||
      candidate.distance < best.distance ||
      (candidate.distance === best.distance && candidate.targetInstance < best.targetInstance)
    ) {
      best = candidate;
    }
  };

  for (const piece of pieces) {
    const spec = table.maybeSpec(piece.spec_id);
    if (!spec) continue;
    const theirOut = socketPosition(piece.position, 'output');
    dragged.inputs.forEach((input, channel) => {
      if (!compatible(spec.output, input)) return;
      const myIn = socketPosition(position, 'input', channel, dragged.inputs.length);
      consider({
        targetInstance: piece.instance_id,
        channel,
        draggedIsProducer: false,
        distance: Math.hypot(theirOut[0] - myIn[0], theirOut[1] - myIn[1]),
      });
    });
    spec.inputs.forEach((input, channel) => {
      if (occupied.has(`${piece.instance_id}:${channel}`)) return;
      if (!compatible(dragged.output, input)) return;
      const theirIn = socketPosition(piece.position, 'input', channel, spec.inputs.length);
      const myOut = socketPosition(position, 'output');
      consider({
        targetInstance: piece.instance_id,
        channel,
        draggedIsProducer: true,
        distance: Math.hypot(theirIn[0] - myOut[0], theirIn[1] - myOut[1]),
      });
    });
  }
  return best;
}
