// Input and output panels: bind user inputs (typed text, uploaded media,
// drawn sketches) to input pieces, and view any piece's run output in a
// modality-appropriate viewer, alone or side by side.

import { ApiClient } from './api.js';
import { parseModality } from './compat.js';
import { SketchPad } from './sketchPad.js';
import { WorkspaceState } from './state.js';

const UPLOAD_TYPES: Record<string, string> = {
  image: 'image/png',
  video: 'video/mp4',
  '3d': 'model/gltf-binary',
  audio: 'audio/wav',
  sketch: 'image/png',
};

export class InputPanel {
  readonly root: HTMLElement;
  sketchPad: SketchPad | null = null;

  constructor(
    readonly api: ApiClient,
    readonly state: WorkspaceState,
    host: HTMLElement,
  ) {
    this.root = document.createElement('div');
    this.root.className = 'input-panel';
    host.append(this.root);
  }

  /** Render the binding control for the selected input piece. */
  render(): void {
    this.root.textContent = '';
    this.sketchPad = null;
    const selected = [...this.state.selection];
    if (selected.length !== 1) return;
    const piece = this.state.piece(selected[0]);
    if (!piece) return;
    const spec = this.state.table.maybeSpec(piece.spec_id);
    if (!spec || spec.kind !== 'input') return;
    const base = parseModality(spec.output).base;
    const heading = document.createElement('h4');
    heading.textContent = spec.display_name;
    this.root.append(heading);
    if (base === 'text') {
      this.renderTextEntry(piece.instance_id);
    } else if (base === 'sketch') {
      this.renderSketchSurface(piece.instance_id);
    } else {
      this.renderUpload(piece.instance_id, base);
    }
    const bound = this.state.inputBindings.get(piece.instance_id);
    if (bound) {
      const status = document.createElement('div');
      status.className = 'binding-status';
      status.textContent = 'text' in bound ? 'text bound' : `blob ${bound.blob.slice(0, 12)}…`;
      this.root.append(status);
    }
  }

  private renderTextEntry(instanceId: string): void {
    const area = document.createElement('textarea');
    area.placeholder = 'Type your input…';
    const existing = this.state.inputBindings.get(instanceId);
    if (existing && 'text' in existing) area.value = existing.text;
    area.addEventListener('change', () => {
      this.state.inputBindings.set(instanceId, { text: area.value });
      this.render();
    });
    this.root.append(area);
  }

  private renderUpload(instanceId: string, base: string): void {
    const picker = document.createElement('input');
    picker.type = 'file';
    picker.addEventListener('change', () => {
      const file = picker.files?.[0];
      if (file) void this.bindFile(instanceId, base, file);
    });
    const dropzone = document.createElement('div');
    dropzone.className = 'dropzone';
    dropzone.textContent = 'Drop a file or use the picker';
    dropzone.addEventListener('dragover', (e) => e.preventDefault());
    dropzone.addEventListener('drop', (e) => {
      e.preventDefault();
      const file = e.dataTransfer?.files?.[0];
      if (file) void this.bindFile(instanceId, base, file);
    });
    this.root.append(picker, dropzone);
  }

  async bindFile(instanceId: string, base: string, file: Blob): Promise<void> {
    const contentType = file.type || UPLOAD_TYPES[base] || 'application/octet-stream';
    try {
      const { hash } = await this.api.uploadBlob(file, contentType);
      this.state.inputBindings.set(instanceId, { blob: hash });
    } catch {
      this.showError(`unsupported file type for ${base}`);
      return;
    }
    this.render();
  }

  private renderSketchSurface(instanceId: string): void {
    const pad = new SketchPad();
    this.sketchPad = pad;
    const commit = document.createElement('button');
    commit.className = 'commit-sketch';
    commit.textContent = 'Use sketch';
    commit.addEventListener('click', () => {
      void this.commitSketch(instanceId);
    });
    this.root.append(pad.canvas, commit);
  }

  async commitSketch(instanceId: string): Promise<void> {
    if (!this.sketchPad || this.sketchPad.isEmpty) return;
    const blob = await this.sketchPad.toPngBlob();
    await this.bindFile(instanceId, 'sketch', blob);
  }

  private showError(message: string): void {
    const error = document.createElement('div');
    error.className = 'input-error';
    error.textContent = message;
    this.root.append(error);
  }
}

export class OutputPanel {
  readonly root: HTMLElement;

  constructor(
    readonly api: ApiClient,
    readonly state: WorkspaceState,
    host: HTMLElement,
  ) {
    this.root = document.createElement('div');
    this.root.className = 'output-panel';
    host.append(this.root);
  }

  /** Show the selected piece's run output; two selected pieces show side by side. */
  async render(): Promise<void> {
    this.root.textContent = '';
    const run = this.state.run;
    if (!run) return;
    const selected = [...this.state.selection].filter((id) => run.entries[id]);
    if (selected.length === 0 || selected.length > 2) return;
    for (const instanceId of selected) {
      this.root.append(await this.renderViewer(run.runId, instanceId));
    }
  }

  private async renderViewer(runId: string, instanceId: string): Promise<HTMLElement> {
    const card = document.createElement('div');
    card.className = 'output-viewer';
    card.dataset.instance = instanceId;
    const entry = this.state.run?.entries[instanceId];
    if (!entry || entry.status !== 'done' || !entry.output) {
      card.textContent = entry ? `(${entry.status})` : '(no output)';
      return card;
    }
    const modality = parseModality(entry.output.modality).base;
    const url = this.api.pieceOutputUrl(runId, instanceId);
    if (modality === 'text') {
      const pre = document.createElement('pre');
      pre.className = 'text-output';
      try {
        pre.textContent = await this.api.fetchPieceOutputText(runId, instanceId);
      } catch {
        pre.textContent = '(failed to fetch output)';
      }
      const copy = document.createElement('button');
      copy.className = 'copy-output';
      copy.textContent = 'Copy';
      copy.addEventListener('click', () => {
        void navigator.clipboard?.writeText(pre.textContent ?? '');
      });
      card.append(pre, copy);
    } else {
      let media: HTMLElement;
      if (modality === 'image' || modality === 'sketch') {
        const img = document.createElement('img');
        img.src = url;
        media = img;
      } else if (modality === 'video') {
        const video = document.createElement('video');
        video.controls = true;
        video.src = url;
        media = video;
      } else if (modality === 'audio') {
        const audio = document.createElement('audio');
        audio.controls = true;
        audio.src = url;
        media = audio;
      } else {
        const shell = document.createElement('div');
        shell.className = 'model-3d-card';
        shell.textContent = '3D model output';
        media = shell;
      }
      media.classList.add('media-output');
      const download = document.createElement('a');
      download.className = 'download-output';
      download.href = url;
      download.download = `${instanceId}.${entry.output.format || formatFor(modality)}`;
      download.textContent = 'Download';
      card.append(media, download);
    }
    return card;
  }
}

function formatFor(base: string): string {
  return { text: 'txt', image: 'png', sketch: 'png', video: 'mp4', audio: 'wav', '3d': 'glb' }[
    base
  ] ?? 'bin';
}
