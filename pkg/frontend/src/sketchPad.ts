// Freehand sketch surface. Strokes are captured as point lists and exported
// as a raster image; the server stores the upload as a sketch-modality blob.

export interface Stroke {
  points: Array<[number, number]>;
}

export class SketchPad {
  readonly canvas: HTMLCanvasElement;
  readonly strokes: Stroke[] = [];
  private active: Stroke | null = null;

  constructor(width = 320, height = 240) {
    this.canvas = document.createElement('canvas');
    this.canvas.width = width;
    this.canvas.height = height;
    this.canvas.className = 'sketch-pad';
    this.canvas.addEventListener('pointerdown', (e) => this.begin([e.offsetX, e.offsetY]));
    this.canvas.addEventListener('pointermove', (e) => this.extend([e.offsetX, e.offsetY]));
    this.canvas.addEventListener('pointerup', () => this.finish());
    this.canvas.addEventListener('pointerleave', () => this.finish());
  }

  begin(point: [number, number]): void {
    this.active = { points: [point] };
  }

  extend(point: [number, number]): void {
    if (!this.active) return;
    this.active.points.push(point);
    this.redraw();
  }

  finish(): void {
    if (this.active && this.active.points.length > 1) {
      this.strokes.push(this.active);
    }
    this.active = null;
    this.redraw();
  }

  clear(): void {
    this.strokes.length = 0;
    this.active = null;
    this.redraw();
  }

  get isEmpty(): boolean {
    return this.strokes.length === 0;
  }

  private redraw(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return; // test environments without 2D rasterization
    ctx.fillStyle = '#ffffff';
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.strokeStyle = '#1a1a1a';
    ctx.lineWidth = 2;
    ctx.lineCap = 'round';
    for (const stroke of [...this.strokes, ...(this.active ? [this.active] : [])]) {
      ctx.beginPath();
      stroke.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
      ctx.stroke();
    }
  }

  /** Raster export; vector strokes are not preserved downstream. */
  async toPngBlob(): Promise<Blob> {
    const dataUrl = this.canvas.toDataURL('image/png');
    const base64 = dataUrl.split(',')[1] ?? '';
    const binary = atob(base64);
    const bytes = new Uint8Array(binary.length);
    for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
    return new Blob([bytes], { type: 'image/png' });
  }
}
