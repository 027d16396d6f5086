// Catalog panel: modality-grouped listing, semantic search, hover tooltips,
// and the drag source for new pieces.

import { ApiClient } from './api.js';
import { CompatTable, parseModality } from './compat.js';
import type { CatalogDocument, PieceSpec } from './types.js';

export class CatalogPanel {
  readonly root: HTMLElement;
  readonly searchBox: HTMLInputElement;
  readonly list: HTMLElement;
  readonly banner: HTMLElement;
  onDragStart: (specId: string) => void = () => {};

  constructor(
    readonly api: ApiClient,
    readonly catalog: CatalogDocument,
    readonly table: CompatTable,
    host: HTMLElement,
  ) {
    this.root = document.createElement('div');
    this.root.className = 'catalog-panel';
    this.searchBox = document.createElement('input');
    this.searchBox.type = 'search';
    this.searchBox.placeholder = 'Describe your task…';
    this.searchBox.className = 'semantic-search';
    this.banner = document.createElement('div');
    this.banner.className = 'offline-banner hidden';
    this.banner.textContent = 'Search is unavailable (API offline)';
    this.list = document.createElement('div');
    this.list.className = 'catalog-list';
    this.root.append(this.searchBox, this.banner, this.list);
    host.append(this.root);

    this.searchBox.addEventListener('input', () => {
      void this.refresh();
    });
    this.renderGrouped();
  }

  async refresh(): Promise<void> {
    const query = this.searchBox.value.trim();
    if (!query) {
      this.renderGrouped();
      return;
    }
    try {
      const { hits } = await this.api.search(query, 12);
      this.banner.classList.add('hidden');
      this.renderFlat(hits.map((h) => h.spec_id));
    } catch {
      this.banner.classList.remove('hidden');
    }
  }

  renderGrouped(): void {
    this.list.textContent = '';
    const groups = new Map<string, PieceSpec[]>();
    for (const spec of this.catalog.specs) {
      const bases =
        spec.kind === 'input'
          ? [parseModality(spec.output).base]
          : [...new Set(spec.inputs.map((m) => parseModality(m).base))];
      for (const base of bases) {
        if (!groups.has(base)) groups.set(base, []);
        groups.get(base)!.push(spec);
      }
    }
    for (const [base, specs] of groups) {
      const section = document.createElement('section');
      section.dataset.group = base;
      const heading = document.createElement('h4');
      heading.textContent = base;
      section.append(heading);
      for (const spec of specs) section.append(this.renderEntry(spec));
      this.list.append(section);
    }
  }

  renderFlat(specIds: string[]): void {
    this.list.textContent = '';
    for (const specId of specIds) {
      const spec = this.table.maybeSpec(specId);
      if (spec) this.list.append(this.renderEntry(spec));
    }
  }

  private renderEntry(spec: PieceSpec): HTMLElement {
    const entry = document.createElement('div');
    entry.className = 'catalog-entry';
    entry.dataset.spec = spec.spec_id;
    entry.draggable = true;
    const label = document.createElement('span');
    label.textContent = spec.display_name;
    entry.append(label);

    const tooltip = document.createElement('div');
    tooltip.className = 'tooltip';
    const runtime =
      spec.typical_runtime_seconds >= 1
        ? `~${Math.round(spec.typical_runtime_seconds)}s`
        : '<1s';
    const exampleIn = spec.example_io.inputs.map((e) => e.description).join(' + ') || '—';
    tooltip.innerHTML = '';
    for (const [cls, text] of [
      ['tooltip-capability', spec.description],
      ['tooltip-runtime', `Typical runtime: ${runtime}`],
      ['tooltip-example', `Example: ${exampleIn} → ${spec.example_io.output.description}`],
    ] as const) {
      const line = document.createElement('div');
      line.className = cls;
      line.textContent = text;
      tooltip.append(line);
    }
    entry.append(tooltip);

    entry.addEventListener('pointerdown', () => this.onDragStart(spec.spec_id));
    entry.addEventListener('dragstart', (event) => {
      event.dataTransfer?.setData('text/spec-id', spec.spec_id);
      this.onDragStart(spec.spec_id);
    });
    return entry;
  }
}
