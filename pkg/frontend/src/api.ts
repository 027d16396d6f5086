import type {
  AssistResponse,
  CatalogDocument,
  MosaicDocument,
  MosaicGraph,
  RunInputBinding,
  RunRecordBody,
  SearchHit,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`API error ${status}`);
  }
}

async function expectJson<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null);
  if (!response.ok) throw new ApiError(response.status, body);
  return body as T;
}

/** Thin typed wrapper over the workspace HTTP API. */
export class ApiClient {
  constructor(readonly base: string = '') {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  getCatalog(): Promise<CatalogDocument> {
    return fetch(this.url('/catalog')).then((r) => expectJson<CatalogDocument>(r));
  }

  search(query: string, k = 10): Promise<{ hits: SearchHit[] }> {
    const params = new URLSearchParams({ q: query, k: String(k) });
    return fetch(this.url(`/catalog/search?${params}`)).then((r) =>
      expectJson<{ hits: SearchHit[] }>(r),
    );
  }

  createMosaic(title: string, mosaic?: MosaicGraph): Promise<MosaicDocument> {
    return fetch(this.url('/mosaics'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ title, mosaic }),
    }).then((r) => expectJson<MosaicDocument>(r));
  }

  getMosaic(id: string): Promise<MosaicDocument> {
    return fetch(this.url(`/mosaics/${id}`)).then((r) => expectJson<MosaicDocument>(r));
  }

  saveMosaic(doc: MosaicDocument): Promise<MosaicDocument> {
    return fetch(this.url(`/mosaics/${doc.id}`), {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ version: doc.version, title: doc.title, mosaic: doc.mosaic }),
    }).then((r) => expectJson<MosaicDocument>(r));
  }

  uploadBlob(data: Blob | ArrayBuffer, contentType: string): Promise<{ hash: string; format: string }> {
    return fetch(this.url('/blobs'), {
      method: 'POST',
      headers: { 'content-type': contentType },
      body: data,
    }).then((r) => expectJson<{ hash: string; format: string }>(r));
  }

  blobUrl(hash: string): string {
    return this.url(`/blobs/${hash}`);
  }

  startRun(
    mosaicId: string,
    chainId: number,
    inputs: Record<string, RunInputBinding>,
  ): Promise<{ run_id: string }> {
    return fetch(this.url(`/mosaics/${mosaicId}/chains/${chainId}/runs`), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ inputs }),
    }).then((r) => expectJson<{ run_id: string }>(r));
  }

  getRun(runId: string): Promise<RunRecordBody> {
    return fetch(this.url(`/runs/${runId}`)).then((r) => expectJson<RunRecordBody>(r));
  }

  pieceOutputUrl(runId: string, instanceId: string): string {
    return this.url(`/runs/${runId}/pieces/${instanceId}/output`);
  }

  fetchPieceOutputText(runId: string, instanceId: string): Promise<string> {
    return fetch(this.pieceOutputUrl(runId, instanceId)).then(async (r) => {
      if (!r.ok) throw new ApiError(r.status, await r.text());
      return r.text();
    });
  }

  assist(mosaicId: string, task: string): Promise<AssistResponse> {
    return fetch(this.url('/assist'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ mosaic_id: mosaicId, task }),
    }).then((r) => expectJson<AssistResponse>(r));
  }

  /** Follow the run event stream; falls back to polling when SSE is unavailable. */
  followRun(runId: string, onEvent: (event: unknown) => void, onDone: () => void): () => void {
    if (typeof EventSource !== 'undefined') {
      const source = new EventSource(this.url(`/runs/${runId}/events`));
      source.onmessage = (message) => {
        const event = JSON.parse(message.data);
        onEvent(event);
        if (event.kind === 'run_done') {
          source.close();
          onDone();
        }
      };
      source.onerror = () => {
        source.close();
        onDone();
      };
      return () => source.close();
    }
    let stopped = false;
    const poll = async () => {
      while (!stopped) {
        const record = await this.getRun(runId);
        if (record.status !== 'running') {
          onDone();
          return;
        }
        await new Promise((resolve) => setTimeout(resolve, 150));
      }
    };
    void poll();
    return () => {
      stopped = true;
    };
  }
}
