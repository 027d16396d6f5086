import { describe, expect, it } from 'vitest';

import {
  CompatTable,
  compatible,
  parseModality,
  PIECE_HEIGHT,
  snapCandidate,
  SNAP_RADIUS,
  socketPosition,
} from '../src/compat.js';
import { loadCatalogFixture } from './helpers.js';

const catalog = loadCatalogFixture();
const table = new CompatTable(catalog);

describe('modality compatibility (mirrors the server rule)', () => {
  it('matches identical modalities', () => {
    expect(compatible('image', 'image')).toBe(true);
    expect(compatible('image(depth)', 'image(depth)')).toBe(true);
  });

  it('rejects base mismatches', () => {
    expect(compatible('text', 'image')).toBe(false);
    expect(compatible('sketch', 'image')).toBe(false);
  });

  it('refined inputs require the exact refinement', () => {
    expect(compatible('image', 'image(depth)')).toBe(false);
    expect(compatible('image(edge)', 'image(depth)')).toBe(false);
  });

  it('refined outputs feed plain inputs', () => {
    expect(compatible('image(depth)', 'image')).toBe(true);
    expect(compatible('audio(music)', 'audio')).toBe(true);
  });

  it('parses refinements', () => {
    expect(parseModality('audio(sound_effects)')).toEqual({
      base: 'audio',
      refinement: 'sound_effects',
    });
  });
});

describe('table generated from the served catalog', () => {
  it('covers all 45 specs and six base colors', () => {
    expect(catalog.specs).toHaveLength(45);
    expect(table.colors.size).toBe(6);
  });

  it('answers spec-level questions from catalog data, not hand-written rules', () => {
    expect(table.canConnect('upload_image', 'tag_image', 0)).toBe(true);
    expect(table.canConnect('upload_image', 'ask_gpt', 0)).toBe(false);
    expect(table.canConnect('get_depth_map', 'generate_image_from_text_and_depth_map', 0)).toBe(true);
    expect(table.canConnect('upload_image', 'generate_image_from_text_and_depth_map', 0)).toBe(false);
    expect(table.canConnect('type_text', 'generate_image_from_text_and_depth_map', 1)).toBe(true);
  });
});

describe('snap candidate search', () => {
  const pieces = [
    { instance_id: 'p1', spec_id: 'upload_image', position: [0, 0] as [number, number] },
  ];

  it('finds the nearby compatible output socket', () => {
    const outSocket = socketPosition([0, 0], 'output');
    const position: [number, number] = [outSocket[0] + 20, outSocket[1] - PIECE_HEIGHT / 2];
    const hit = snapCandidate(table, pieces, new Set(), 'tag_image', position);
    expect(hit).not.toBeNull();
    expect(hit!.targetInstance).toBe('p1');
    expect(hit!.channel).toBe(0);
    expect(hit!.draggedIsProducer).toBe(false);
    expect(hit!.distance).toBeLessThanOrEqual(SNAP_RADIUS);
  });

  it('never returns an incompatible socket', () => {
    const outSocket = socketPosition([0, 0], 'output');
    const position: [number, number] = [outSocket[0] + 20, outSocket[1] - PIECE_HEIGHT / 2];
    expect(snapCandidate(table, pieces, new Set(), 'ask_gpt', position)).toBeNull();
  });

  it('ignores sockets beyond the snap radius', () => {
    const position: [number, number] = [SNAP_RADIUS * 5, 0];
    expect(snapCandidate(table, pieces, new Set(), 'tag_image', position)).toBeNull();
  });

  it('skips occupied input channels', () => {
    const occupied = new Set(['p1:0']);
    const taggers = [
      { instance_id: 'p1', spec_id: 'tag_image', position: [300, 0] as [number, number] },
    ];
    const hit = snapCandidate(table, taggers, occupied, 'upload_image', [90, 0]);
    expect(hit).toBeNull();
  });
});
