// The assembly canvas: placed pieces, wires, drag/snap/repel interactions,
// selection, hotkeys, a trash target, per-chain run buttons, and the
// parameters sidebar.

import {
  PIECE_HEIGHT,
  PIECE_WIDTH,
  SNAP_RADIUS,
  nearestSocketDistance,
  snapCandidate,
  socketPosition,
} from './compat.js';
import type { SnapCandidate } from './compat.js';
import { WorkspaceState } from './state.js';
import type { ParameterSpec } from './types.js';

export interface DragSession {
  specId: string;
  position: [number, number];
  candidate: SnapCandidate | null;
  movingInstance?: string;
}

export class AssemblyPanel {
  readonly root: HTMLElement;
  readonly wires: SVGSVGElement;
  readonly layer: HTMLElement;
  readonly trash: HTMLElement;
  readonly preview: HTMLElement;
  readonly runBar: HTMLElement;
  readonly sidebar: HTMLElement;
  drag: DragSession | null = null;
  onRunChain: (chainId: number) => void = () => {};
  onSelect: () => void = () => {};

  constructor(
    readonly state: WorkspaceState,
    host: HTMLElement,
  ) {
    this.root = document.createElement('div');
    this.root.className = 'assembly-panel';
    this.wires = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
    this.wires.classList.add('wires');
    this.layer = document.createElement('div');
    this.layer.className = 'piece-layer';
    this.preview = document.createElement('div');
    this.preview.className = 'snap-preview hidden';
    this.trash = document.createElement('div');
    this.trash.className = 'trash';
    this.trash.textContent = '🗑';
    this.runBar = document.createElement('div');
    this.runBar.className = 'run-bar';
    this.sidebar = document.createElement('aside');
    this.sidebar.className = 'parameters-sidebar';
    this.root.append(this.wires, this.layer, this.preview, this.trash, this.runBar);
    host.append(this.root, this.sidebar);
    this.bindHotkeys();
    this.render();
  }

  private bindHotkeys(): void {
    document.addEventListener('keydown', (event) => {
      const meta = event.ctrlKey || event.metaKey;
      if (meta && event.key.toLowerCase() === 'z' && event.shiftKey) {
        this.state.redo();
        event.preventDefault();
      } else if (meta && event.key.toLowerCase() === 'z') {
        this.state.undo();
        event.preventDefault();
      } else if (meta && event.key.toLowerCase() === 'y') {
        this.state.redo();
        event.preventDefault();
      } else if (meta && event.key.toLowerCase() === 'd') {
        for (const id of [...this.state.selection]) this.state.duplicatePiece(id);
        event.preventDefault();
      } else if (event.key === 'Delete' || event.key === 'Backspace') {
        if (this.state.selection.size) {
          this.state.removePieces([...this.state.selection]);
          event.preventDefault();
        }
      }
    });
  }

  // -- dragging a spec out of the catalog -----------------------------------

  beginCatalogDrag(specId: string, position: [number, number]): void {
    this.drag = { specId, position, candidate: null };
    this.updateDrag(position);
  }

  beginPieceDrag(instanceId: string, position: [number, number]): void {
    const piece = this.state.piece(instanceId);
    if (!piece) return;
    this.drag = {
      specId: piece.spec_id,
      position,
      candidate: null,
      movingInstance: instanceId,
    };
    this.updateDrag(position);
  }

  updateDrag(position: [number, number]): void {
    if (!this.drag) return;
    this.drag.position = position;
    const others = this.state
      .graph()
      .pieces.filter((p) => p.instance_id !== this.drag?.movingInstance);
    this.drag.candidate = snapCandidate(
      this.state.table,
      others,
      this.state.occupiedInputs(),
      this.drag.specId,
      position,
    );
    this.renderPreview();
  }

  /** Finish the drag: snap + connect when a compatible socket is near, repel otherwise. */
  endDrag(overTrash = false): { connected: boolean; repelled: boolean; instanceId?: string } {
    const drag = this.drag;
    this.drag = null;
    this.preview.classList.add('hidden');
    if (!drag) return { connected: false, repelled: false };
    if (overTrash) {
      if (drag.movingInstance) this.state.removePieces([drag.movingInstance]);
      this.render();
      return { connected: false, repelled: false };
    }
    const candidate = drag.candidate;
    let instanceId = drag.movingInstance;
    if (candidate) {
      const snapped = this.snappedPosition(drag, candidate);
      if (instanceId) {
        this.state.movePieces(new Map([[instanceId, snapped]]));
      } else {
        instanceId = this.state.addPiece(drag.specId, snapped).instance_id;
      }
      const connected = candidate.draggedIsProducer
        ? this.state.connect(instanceId, candidate.targetInstance, candidate.channel)
        : this.state.connect(candidate.targetInstance, instanceId, candidate.channel);
      this.render();
      return { connected, repelled: false, instanceId };
    }
    // No compatible socket nearby. A socket dropped onto another socket is a
    // forced fit and gets repelled; open space places the piece free-standing.
    const others = this.state
      .graph()
      .pieces.filter((p) => p.instance_id !== drag.movingInstance);
    const nearest = nearestSocketDistance(
      this.state.table,
      others,
      drag.specId,
      drag.position,
    );
    if (nearest !== null && nearest <= SNAP_RADIUS) {
      const repelledTo: [number, number] = [
        drag.position[0] + PIECE_WIDTH * 0.75,
        drag.position[1] + PIECE_HEIGHT * 0.75,
      ];
      if (instanceId) {
        this.state.movePieces(new Map([[instanceId, repelledTo]]));
      }
      this.render();
      this.flashRepel();
      return { connected: false, repelled: true, instanceId };
    }
    if (instanceId) {
      this.state.movePieces(new Map([[instanceId, drag.position]]));
    } else {
      instanceId = this.state.addPiece(drag.specId, drag.position).instance_id;
    }
    this.render();
    return { connected: false, repelled: false, instanceId };
  }

  private snappedPosition(drag: DragSession, candidate: SnapCandidate): [number, number] {
    const target = this.state.piece(candidate.targetInstance);
    const spec = this.state.table.spec(drag.specId);
    if (!target) return drag.position;
    if (candidate.draggedIsProducer) {
      const targetSpec = this.state.table.spec(target.spec_id);
      const socket = socketPosition(
        target.position,
        'input',
        candidate.channel,
        targetSpec.inputs.length,
      );
      return [socket[0] - PIECE_WIDTH, socket[1] - PIECE_HEIGHT / 2];
    }
    const socket = socketPosition(target.position, 'output');
    const myIn = socketPosition([0, 0], 'input', candidate.channel, spec.inputs.length);
    return [socket[0] - myIn[0], socket[1] - myIn[1]];
  }

  private flashRepel(): void {
    this.root.classList.add('repelled');
    setTimeout(() => this.root.classList.remove('repelled'), 300);
  }

  // -- rendering -------------------------------------------------------------

  renderPreview(): void {
    if (!this.drag) return;
    const candidate = this.drag.candidate;
    if (!candidate) {
      this.preview.classList.add('hidden');
      return;
    }
    const snapped = this.snappedPosition(this.drag, candidate);
    this.preview.classList.remove('hidden');
    this.preview.style.left = `${snapped[0]}px`;
    this.preview.style.top = `${snapped[1]}px`;
    this.preview.dataset.target = candidate.targetInstance;
    this.preview.dataset.channel = String(candidate.channel);
  }

  render(): void {
    this.layer.textContent = '';
    for (const piece of this.state.graph().pieces) {
      this.layer.append(this.renderPiece(piece.instance_id));
    }
    this.renderWires();
    this.renderRunBar();
    this.renderSidebar();
    this.onSelect();
  }

  private renderPiece(instanceId: string): HTMLElement {
    const piece = this.state.piece(instanceId)!;
    const spec = this.state.table.maybeSpec(piece.spec_id);
    const el = document.createElement('div');
    el.className = 'piece';
    el.dataset.instance = instanceId;
    el.dataset.spec = piece.spec_id;
    el.style.left = `${piece.position[0]}px`;
    el.style.top = `${piece.position[1]}px`;
    if (this.state.selection.has(instanceId)) el.classList.add('selected');
    const entry = this.state.run?.entries[instanceId];
    if (entry) el.dataset.runStatus = entry.status;
    if (!spec) {
      el.classList.add('unknown-spec');
      el.textContent = `${piece.spec_id} (unavailable)`;
      return el;
    }
    const title = document.createElement('span');
    title.className = 'piece-title';
    title.textContent = spec.display_name;
    el.append(title);
    spec.inputs.forEach((modality, channel) => {
      const arm = document.createElement('i');
      arm.className = 'arm arm-in';
      arm.dataset.channel = String(channel);
      arm.style.background = this.state.table.colorOf(modality);
      arm.title = modality;
      el.append(arm);
    });
    const out = document.createElement('i');
    out.className = 'arm arm-out';
    out.style.background = this.state.table.colorOf(spec.output);
    out.title = spec.output;
    el.append(out);
    el.addEventListener('pointerdown', (event) => {
      this.select(instanceId, event.shiftKey);
    });
    return el;
  }

  private renderWires(): void {
    this.wires.textContent = '';
    for (const connection of this.state.graph().connections) {
      const from = this.state.piece(connection.from);
      const to = this.state.piece(connection.to);
      if (!from || !to) continue;
      const toSpec = this.state.table.maybeSpec(to.spec_id);
      const a = socketPosition(from.position, 'output');
      const b = socketPosition(
        to.position,
        'input',
        connection.channel,
        toSpec ? toSpec.inputs.length : 1,
      );
      const path = document.createElementNS('http://www.w3.org/2000/svg', 'path');
      const bend = Math.max(40, Math.abs(b[0] - a[0]) / 2);
      path.setAttribute(
        'd',
        `M ${a[0]} ${a[1]} C ${a[0] + bend} ${a[1]}, ${b[0] - bend} ${b[1]}, ${b[0]} ${b[1]}`,
      );
      path.dataset.from = connection.from;
      path.dataset.to = connection.to;
      this.wires.append(path);
    }
  }

  private renderRunBar(): void {
    this.runBar.textContent = '';
    this.state.chains().forEach((chain, index) => {
      const button = document.createElement('button');
      button.className = 'run-chain';
      button.dataset.chain = String(index);
      button.textContent = `Run chain ${index + 1} (${chain.length})`;
      button.addEventListener('click', () => this.onRunChain(index));
      this.runBar.append(button);
    });
  }

  select(instanceId: string, additive: boolean): void {
    if (!additive) this.state.selection.clear();
    this.state.selection.add(instanceId);
    this.render();
  }

  private renderSidebar(): void {
    this.sidebar.textContent = '';
    if (this.state.selection.size !== 1) return;
    const [instanceId] = [...this.state.selection];
    const piece = this.state.piece(instanceId);
    if (!piece) return;
    const spec = this.state.table.maybeSpec(piece.spec_id);
    if (!spec) return;
    const heading = document.createElement('h3');
    heading.textContent = spec.display_name;
    this.sidebar.append(heading);
    for (const parameter of spec.parameters) {
      this.sidebar.append(this.parameterRow(instanceId, parameter, piece.parameters[parameter.name]));
    }
  }

  private parameterRow(
    instanceId: string,
    parameter: ParameterSpec,
    value: unknown,
  ): HTMLElement {
    const row = document.createElement('label');
    row.className = 'parameter-row';
    row.title = parameter.tooltip;
    const caption = document.createElement('span');
    caption.textContent = parameter.name;
    row.append(caption);
    let control: HTMLInputElement | HTMLSelectElement;
    if (parameter.kind === 'enum') {
      control = document.createElement('select');
      for (const choice of parameter.choices ?? []) {
        const option = document.createElement('option');
        option.value = choice;
        option.textContent = choice;
        control.append(option);
      }
      control.value = String(value ?? parameter.default);
    } else if (parameter.kind === 'boolean') {
      control = document.createElement('input');
      control.type = 'checkbox';
      control.checked = Boolean(value);
    } else {
      control = document.createElement('input');
      control.type = parameter.kind === 'text' ? 'text' : 'number';
      if (parameter.kind !== 'text') {
        if (parameter.minimum !== undefined) control.min = String(parameter.minimum);
        if (parameter.maximum !== undefined) control.max = String(parameter.maximum);
        if (parameter.kind === 'integer') control.step = '1';
      }
      control.value = String(value ?? parameter.default);
    }
    control.dataset.parameter = parameter.name;
    control.addEventListener('change', () => {
      this.state.setParameter(instanceId, parameter.name, this.readControl(control, parameter));
      this.render();
    });
    row.append(control);
    return row;
  }

  /** Clamp numeric input to the schema bounds so the model cannot be broken from the UI. */
  private readControl(
    control: HTMLInputElement | HTMLSelectElement,
    parameter: ParameterSpec,
  ): unknown {
    if (parameter.kind === 'boolean') return (control as HTMLInputElement).checked;
    if (parameter.kind === 'enum' || parameter.kind === 'text') return control.value;
    let numeric = Number(control.value);
    if (Number.isNaN(numeric)) numeric = Number(parameter.default);
    if (parameter.minimum !== undefined) numeric = Math.max(parameter.minimum, numeric);
    if (parameter.maximum !== undefined) numeric = Math.min(parameter.maximum, numeric);
    if (parameter.kind === 'integer') numeric = Math.round(numeric);
    return numeric;
  }
}
