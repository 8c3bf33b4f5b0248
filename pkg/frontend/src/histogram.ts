/** Per-cube histogram with a two-handle range brush: dragging across the
 * chart picks [lo, hi] in value space and commits it as the shared clip
 * range. Canvas drawing degrades gracefully where 2D contexts are
 * unavailable (headless tests); the brush math never depends on layout. */

import type { ManagerApi } from "./api.js";
import type { HistogramPayload } from "./types.js";

const FALLBACK_WIDTH = 256; // used when the element has no layout (jsdom)
const HEIGHT = 96;

export interface HistogramCallbacks {
  onClip(lo: number, hi: number): void;
}

export class HistogramPanel {
  data: HistogramPayload | null = null;
  slot: string | null = null;
  brush: [number, number] | null = null;
  private dragStart: number | null = null;
  private readonly canvas: HTMLCanvasElement;
  private readonly hint: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly api: ManagerApi,
    private readonly callbacks: HistogramCallbacks,
    private readonly bins = 32,
  ) {
    this.hint = document.createElement("div");
    this.hint.className = "panel-hint";
    this.hint.textContent = "select an occupied screen and query";
    this.canvas = document.createElement("canvas");
    this.canvas.className = "histogram-canvas";
    this.canvas.width = FALLBACK_WIDTH;
    this.canvas.height = HEIGHT;
    root.appendChild(this.hint);
    root.appendChild(this.canvas);

    this.canvas.addEventListener("mousedown", (ev) => {
      this.dragStart = this.fraction(ev);
      this.brush = [this.dragStart, this.dragStart];
      this.draw();
    });
    this.canvas.addEventListener("mousemove", (ev) => {
      if (this.dragStart === null) return;
      const f = this.fraction(ev);
      this.brush = [Math.min(this.dragStart, f), Math.max(this.dragStart, f)];
      this.draw();
    });
    this.canvas.addEventListener("mouseup", (ev) => {
      if (this.dragStart === null) return;
      const f = this.fraction(ev);
      const lo = Math.min(this.dragStart, f);
      const hi = Math.max(this.dragStart, f);
      this.dragStart = null;
      this.brush = [lo, hi];
      this.draw();
      this.callbacks.onClip(round3(lo), round3(hi));
    });
  }

  private fraction(ev: MouseEvent): number {
    const rect = this.canvas.getBoundingClientRect();
    const width = rect.width || FALLBACK_WIDTH;
    const f = (ev.clientX - rect.left) / width;
    return Math.min(1, Math.max(0, f));
  }

  async show(slot: string | null): Promise<void> {
    this.slot = slot;
    if (!slot) {
      this.data = null;
      this.hint.textContent = "select an occupied screen and query";
      this.draw();
      return;
    }
    const result = await this.api.histogram(slot, this.bins);
    if (!result.ok || !result.histogram) {
      this.data = null;
      this.hint.textContent = result.error?.message ?? "no data on this screen";
    } else {
      this.data = result.histogram;
      this.hint.textContent = `${result.id} on ${slot} — drag to clip`;
    }
    this.draw();
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    if (!this.data) return;
    const counts = this.data.counts;
    const peak = Math.max(1, ...counts);
    const barW = width / counts.length;
    ctx.fillStyle = "#5a8fd6";
    counts.forEach((count, i) => {
      const h = Math.round(((height - 4) * count) / peak);
      ctx.fillRect(i * barW + 0.5, height - h, Math.max(1, barW - 1), h);
    });
    if (this.brush) {
      const [lo, hi] = this.brush;
      ctx.fillStyle = "rgba(240, 200, 80, 0.25)";
      ctx.fillRect(lo * width, 0, (hi - lo) * width, height);
      ctx.strokeStyle = "#f0c850";
      ctx.strokeRect(lo * width, 0, (hi - lo) * width, height);
    }
  }
}

function round3(x: number): number {
  return Math.round(x * 1000) / 1000;
}
