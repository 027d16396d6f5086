// Assembly assistant box: a task prompt that asks the server to plan,
// validate, and drop a new chain onto the canvas.

import { ApiClient } from './api.js';
import { WorkspaceState } from './state.js';

export class AssistantBox {
  readonly root: HTMLElement;
  readonly input: HTMLInputElement;
  readonly button: HTMLButtonElement;
  readonly reportBox: HTMLElement;
  onMaterialized: () => void = () => {};

  constructor(
    readonly api: ApiClient,
    readonly state: WorkspaceState,
    host: HTMLElement,
  ) {
    this.root = document.createElement('div');
    this.root.className = 'assistant-box';
    this.input = document.createElement('input');
    this.input.placeholder = 'Describe a task, e.g. help add music based on the image';
    this.button = document.createElement('button');
    this.button.textContent = 'Assist';
    this.reportBox = document.createElement('div');
    this.reportBox.className = 'assistant-report';
    this.root.append(this.input, this.button, this.reportBox);
    host.append(this.root);
    this.button.addEventListener('click', () => {
      void this.submit();
    });
  }

  async submit(): Promise<void> {
    const task = this.input.value.trim();
    if (!task) return;
    this.button.disabled = true;
    this.reportBox.textContent = 'Planning…';
    try {
      const response = await this.api.assist(this.state.doc.id, task);
      if (response.materialized && response.mosaic) {
        this.state.doc = response.mosaic;
        this.reportBox.textContent = '';
        const summary = document.createElement('div');
        summary.className = 'assistant-success';
        summary.textContent = `Added ${response.added_instances?.length ?? 0} pieces. Task fit is judged by the model; wiring and format were machine-checked.`;
        this.reportBox.append(summary);
        this.onMaterialized();
      } else {
        this.reportBox.textContent = '';
        const failure = document.createElement('div');
        failure.className = 'assistant-failure';
        failure.textContent = 'No valid plan after self-correction; canvas unchanged.';
        this.reportBox.append(failure);
        for (const round of response.rounds ?? []) {
          const details = document.createElement('pre');
          details.className = 'assistant-round';
          details.textContent = JSON.stringify(round.report, null, 1);
          this.reportBox.append(details);
        }
      }
    } catch (error) {
      this.reportBox.textContent = `Assistant unavailable: ${String(error)}`;
    } finally {
      this.button.disabled = false;
    }
  }
}
