// Payload shapes served by the workspace API (see docs/schemas in the repo root).

export interface ParameterSpec {
  name: string;
  kind: 'integer' | 'real' | 'enum' | 'boolean' | 'text';
  default: unknown;
  tooltip: string;
  minimum?: number;
  maximum?: number;
  choices?: string[];
}

export interface ExampleEntry {
  modality: string;
  description: string;
}

export interface PieceSpec {
  spec_id: string;
  display_name: string;
  kind: 'input' | 'model' | 'glue';
  model_name: string;
  inputs: string[];
  output: string;
  description: string;
  typical_runtime_seconds: number;
  example_io: { inputs: ExampleEntry[]; output: ExampleEntry };
  parameters: ParameterSpec[];
}

export interface CatalogDocument {
  format_version: number;
  fingerprint: string;
  aliases: Record<string, string>;
  specs: PieceSpec[];
}

export interface PieceInstance {
  instance_id: string;
  spec_id: string;
  position: [number, number];
  parameters: Record<string, unknown>;
}

export interface Connection {
  from: string;
  to: string;
  channel: number;
}

export interface MosaicGraph {
  pieces: PieceInstance[];
  connections: Connection[];
}

export interface MosaicDocument {
  format_version: number;
  id: string;
  title: string;
  version: number;
  catalog_fingerprint: string;
  mosaic: MosaicGraph;
  flagged_instances?: string[];
}

export interface SearchHit {
  spec_id: string;
  score: number;
  rank: number;
}

export interface MediaValueBody {
  modality: string;
  format: string;
  hash: string;
  text: string | null;
}

export interface RunEntry {
  status: 'pending' | 'running' | 'done' | 'failed' | 'skipped';
  output: MediaValueBody | null;
  error?: string | null;
  cache_hit?: boolean;
}

export interface RunRecordBody {
  run_id: string;
  chain_id: number;
  status: 'running' | 'done' | 'failed';
  piece_order: string[];
  entries: Record<string, RunEntry>;
}

export interface RunEventBody {
  run_id: string;
  seq: number;
  kind: 'piece_started' | 'piece_done' | 'piece_failed' | 'run_done';
  instance_id: string | null;
  modality: string | null;
  output_hash: string | null;
  status: string | null;
}

export interface AssistResponse {
  materialized: boolean;
  report?: Record<string, unknown>;
  rounds: Array<{ answer: string; report: Record<string, unknown> }>;
  added_instances?: string[];
  mosaic?: MosaicDocument;
}

export type RunInputBinding = { text: string } | { blob: string; format?: string };
