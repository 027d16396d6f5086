// Test scaffolding: a route-table fetch stub standing in for the workspace
// service, plus the bundled catalog snapshot.

import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import { dirname, join } from 'node:path';
import { vi } from 'vitest';
import type { CatalogDocument, MosaicDocument, MosaicGraph } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));

export function loadCatalogFixture(): CatalogDocument {
  return JSON.parse(readFileSync(join(here, 'fixtures', 'catalog.json'), 'utf-8'));
}

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
  contentType: string;
  rawBody?: Uint8Array;
}

type Handler = (request: RecordedRequest) => { status?: number; body?: unknown; raw?: string };

// jsdom Blobs predate Blob.arrayBuffer(); fall back to FileReader there.
async function blobBytes(blob: Blob): Promise<Uint8Array> {
  if (typeof blob.arrayBuffer === 'function') {
    return new Uint8Array(await blob.arrayBuffer());
  }
  return await new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(new Uint8Array(reader.result as ArrayBuffer));
    reader.onerror = () => reject(reader.error);
    reader.readAsArrayBuffer(blob);
  });
}

export class FakeServer {
  requests: RecordedRequest[] = [];
  private routes: Array<{ method: string; pattern: RegExp; handler: Handler }> = [];

  on(method: string, pattern: RegExp, handler: Handler): this {
    this.routes.push({ method: method.toUpperCase(), pattern, handler });
    return this;
  }

  install(): void {
    vi.stubGlobal('fetch', async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = typeof input === 'string' ? input : input.toString();
      const path = url.replace(/^https?:\/\/[^/]+/, '');
      const method = (init?.method ?? 'GET').toUpperCase();
      let body: unknown = null;
      let rawBody: Uint8Array | undefined;
      const contentType = String(
        (init?.headers as Record<string, string> | undefined)?.['content-type'] ?? '',
      );
      if (init?.body != null) {
        if (typeof init.body === 'string') {
          body = contentType.includes('json') ? JSON.parse(init.body) : init.body;
        } else if (init.body instanceof Blob) {
          rawBody = await blobBytes(init.body);
        } else if (init.body instanceof ArrayBuffer) {
          rawBody = new Uint8Array(init.body);
        }
      }
      const request: RecordedRequest = { method, path, body, contentType, rawBody };
      this.requests.push(request);
      for (const route of this.routes) {
        if (route.method === method && route.pattern.test(path)) {
          const result = route.handler(request);
          const status = result.status ?? 200;
          const text = result.raw ?? JSON.stringify(result.body ?? {});
          return new Response(text, {
            status,
            headers: { 'content-type': result.raw ? 'text/plain' : 'application/json' },
          });
        }
      }
      return new Response(JSON.stringify({ error: 'not_found', message: path }), { status: 404 });
    });
  }

  sent(method: string, pattern: RegExp): RecordedRequest[] {
    return this.requests.filter((r) => r.method === method.toUpperCase() && pattern.test(r.path));
  }
}

export function emptyDocument(id = 'doc1'): MosaicDocument {
  return {
    format_version: 1,
    id,
    title: 'Untitled mosaic',
    version: 1,
    catalog_fingerprint: 'x',
    mosaic: { pieces: [], connections: [] },
  };
}

export function documentWith(graph: MosaicGraph, id = 'doc1', version = 1): MosaicDocument {
  return { ...emptyDocument(id), version, mosaic: graph };
}

/** Stub server that persists a mosaic document like the real service. */
export function workspaceServer(catalog: CatalogDocument, initial?: MosaicDocument): {
  server: FakeServer;
  current: () => MosaicDocument;
} {
  let doc = initial ?? emptyDocument();
  const server = new FakeServer()
    .on('GET', /^\/catalog$/, () => ({ body: catalog }))
    .on('POST', /^\/mosaics$/, (request) => {
      const body = request.body as { title?: string; mosaic?: MosaicGraph };
      doc = {
        ...emptyDocument(),
        title: body.title ?? 'Untitled mosaic',
        mosaic: body.mosaic ?? { pieces: [], connections: [] },
      };
      return { status: 201, body: doc };
    })
    .on('GET', /^\/mosaics\/[^/]+$/, () => ({ body: doc }))
    .on('PUT', /^\/mosaics\/[^/]+$/, (request) => {
      const body = request.body as { version: number; title: string; mosaic: MosaicGraph };
      if (body.version !== doc.version) {
        return { status: 409, body: { error: 'version_conflict' } };
      }
      doc = { ...doc, version: doc.version + 1, title: body.title, mosaic: body.mosaic };
      return { body: doc };
    });
  return { server, current: () => doc };
}
