// Application bootstrap: four panels wired against the workspace API.

import { ApiClient } from './api.js';
import { AssemblyPanel } from './assemblyPanel.js';
import { AssistantBox } from './assistantBox.js';
import { CatalogPanel } from './catalogPanel.js';
import { CompatTable } from './compat.js';
import { InputPanel, OutputPanel } from './ioPanels.js';
import { foldRunEvent, runViewFromRecord, WorkspaceState } from './state.js';
import type { RunEventBody, RunInputBinding } from './types.js';

export async function bootstrap(host: HTMLElement, api = new ApiClient()): Promise<{
  state: WorkspaceState;
  assembly: AssemblyPanel;
  catalogPanel: CatalogPanel;
  inputPanel: InputPanel;
  outputPanel: OutputPanel;
  assistant: AssistantBox;
}> {
  const catalog = await api.getCatalog();
  const table = new CompatTable(catalog);

  const params = new URLSearchParams(location.search);
  const existing = params.get('mosaic');
  const doc = existing
    ? await api.getMosaic(existing)
    : await api.createMosaic('Untitled mosaic');

  const state = new WorkspaceState(doc, table);

  const catalogHost = panel(host, 'catalog-host');
  const assemblyHost = panel(host, 'assembly-host');
  const ioHost = panel(host, 'io-host');
  const assistantHost = panel(host, 'assistant-host');

  const catalogPanel = new CatalogPanel(api, catalog, table, catalogHost);
  const assembly = new AssemblyPanel(state, assemblyHost);
  const inputPanel = new InputPanel(api, state, ioHost);
  const outputPanel = new OutputPanel(api, state, ioHost);
  const assistant = new AssistantBox(api, state, assistantHost);

  catalogPanel.onDragStart = (specId) => {
    assembly.beginCatalogDrag(specId, [80, 80]);
  };

  assembly.onSelect = () => {
    inputPanel.render();
    void outputPanel.render();
  };

  let saving = Promise.resolve();
  state.onChange = () => {
    assembly.render();
    // optimistic autosave; a 409 means another tab won and we reload
    saving = saving.then(async () => {
      try {
        state.doc = await api.saveMosaic(state.doc);
      } catch (error) {
        const status = (error as { status?: number }).status;
        if (status === 409) {
          state.doc = await api.getMosaic(state.doc.id);
          assembly.render();
          toast(host, 'Mosaic changed elsewhere; reloaded latest version');
        } else if (status === 400) {
          toast(host, 'Server rejected the edit');
        }
      }
    });
  };

  assembly.onRunChain = (chainId) => {
    const inputs: Record<string, RunInputBinding> = {};
    const chain = state.chains()[chainId] ?? [];
    for (const instanceId of chain) {
      const binding = state.inputBindings.get(instanceId);
      if (binding) inputs[instanceId] = binding;
    }
    void api
      .startRun(state.doc.id, chainId, inputs)
      .then(({ run_id }) => {
        state.run = { runId: run_id, status: 'running', entries: {} };
        assembly.render();
        api.followRun(
          run_id,
          (event) => {
            if (state.run) state.run = foldRunEvent(state.run, event as RunEventBody);
            assembly.render();
          },
          () => {
            void api.getRun(run_id).then((record) => {
              state.run = runViewFromRecord(record);
              assembly.render();
            });
          },
        );
      })
      .catch(() => toast(host, 'Run rejected; check inputs and validity'));
  };

  assistant.onMaterialized = () => {
    assembly.render();
  };

  assembly.render();
  return { state, assembly, catalogPanel, inputPanel, outputPanel, assistant };
}

function panel(host: HTMLElement, className: string): HTMLElement {
  const el = document.createElement('div');
  el.className = className;
  host.append(el);
  return el;
}

function toast(host: HTMLElement, message: string): void {
  const el = document.createElement('div');
  el.className = 'toast';
  el.textContent = message;
  host.append(el);
  setTimeout(() => el.remove(), 4000);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void bootstrap(document.getElementById('app')!);
}
