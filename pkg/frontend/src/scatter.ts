/** Cross-cube scatter: one point per occupied screen, catalog field on x,
 * node-computed statistic on y. Text columns get a categorical axis.
 * Hovering a point highlights its screen on the miniature grid and issues a
 * (rate-limited) selection command so the wall shows the highlight frame. */

import type { ManagerApi } from "./api.js";
import { RateLimiter } from "./debounce.js";
import type { ScatterPoint, ScatterResult } from "./types.js";

const FALLBACK_WIDTH = 256;
const HEIGHT = 160;
const PAD = 18;
const HOVER_LIMIT_MS = 100;

export interface ScatterCallbacks {
  onHighlight(slot: string | null): void;
  onSelect(slots: string[]): void;
}

interface PlacedPoint {
  point: ScatterPoint;
  px: number;
  py: number;
}

export class ScatterPanel {
  result: ScatterResult | null = null;
  categorical: string[] | null = null;
  private placed: PlacedPoint[] = [];
  private readonly canvas: HTMLCanvasElement;
  private readonly status: HTMLElement;
  private readonly hoverSelect: RateLimiter<string[]>;

  constructor(
    root: HTMLElement,
    private readonly api: ManagerApi,
    private readonly callbacks: ScatterCallbacks,
  ) {
    this.status = document.createElement("div");
    this.status.className = "panel-hint";
    this.canvas = document.createElement("canvas");
    this.canvas.className = "scatter-canvas";
    this.canvas.width = FALLBACK_WIDTH;
    this.canvas.height = HEIGHT;
    root.appendChild(this.status);
    root.appendChild(this.canvas);
    this.hoverSelect = new RateLimiter(HOVER_LIMIT_MS, (slots) =>
      this.callbacks.onSelect(slots),
    );

    this.canvas.addEventListener("mousemove", (ev) => {
      const hit = this.pick(ev);
      this.callbacks.onHighlight(hit ? hit.point.slot : null);
      if (hit) this.hoverSelect.push([hit.point.slot]);
    });
    this.canvas.addEventListener("mouseleave", () => {
      this.callbacks.onHighlight(null);
    });
    this.canvas.addEventListener("click", (ev) => {
      const hit = this.pick(ev);
      if (hit) this.callbacks.onSelect([hit.point.slot]);
    });
  }

  private pick(ev: MouseEvent): PlacedPoint | null {
    const rect = this.canvas.getBoundingClientRect();
    const width = rect.width || this.canvas.width;
    const scale = this.canvas.width / width;
    const x = (ev.clientX - rect.left) * scale;
    const y = (ev.clientY - rect.top) * scale;
    let best: PlacedPoint | null = null;
    let bestDist = 81; // 9px pick radius
    for (const placed of this.placed) {
      const d = (placed.px - x) ** 2 + (placed.py - y) ** 2;
      if (d < bestDist) {
        best = placed;
        bestDist = d;
      }
    }
    return best;
  }

  async show(xField: string, yStat: string): Promise<void> {
    const result = await this.api.scatter(xField, yStat);
    this.result = result;
    if (!result.ok) {
      this.status.textContent = result.error?.message ?? "query failed";
      this.placed = [];
      return;
    }
    const badges = result.warnings.length
      ? ` — ${result.warnings.length} warning(s)`
      : "";
    this.status.textContent = result.points.length
      ? `${result.points.length} cubes: ${yStat} vs ${xField}${badges}`
      : "no cubes loaded";
    this.place();
    this.draw();
  }

  /** Compute pixel positions; text x-values become evenly spaced categories
   * in code-point order. */
  private place(): void {
    this.placed = [];
    this.categorical = null;
    if (!this.result) return;
    const points = this.result.points;
    if (!points.length) return;
    const numericX = points.every(
      (p) => p.x === null || typeof p.x === "number",
    );
    const w = this.canvas.width - 2 * PAD;
    const h = this.canvas.height - 2 * PAD;

    let xOf: (p: ScatterPoint) => number;
    if (numericX) {
      const xs = points
        .map((p) => p.x)
        .filter((x): x is number => typeof x === "number");
      const lo = Math.min(...xs, 0);
      const hi = Math.max(...xs, lo + 1e-9);
      xOf = (p) =>
        typeof p.x === "number" ? (p.x - lo) / Math.max(1e-12, hi - lo) : 0;
    } else {
      const categories = [...new Set(points.map((p) => String(p.x ?? "")))].sort();
      this.categorical = categories;
      xOf = (p) =>
        categories.length < 2
          ? 0.5
          : categories.indexOf(String(p.x ?? "")) / (categories.length - 1);
    }
    const ys = points.map((p) => p.y);
    const yLo = Math.min(...ys, 0);
    const yHi = Math.max(...ys, yLo + 1e-9);
    for (const point of points) {
      this.placed.push({
        point,
        px: PAD + xOf(point) * w,
        py: PAD + h - ((point.y - yLo) / Math.max(1e-12, yHi - yLo)) * h,
      });
    }
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.strokeStyle = "#445";
    ctx.strokeRect(PAD, PAD, this.canvas.width - 2 * PAD,
                   this.canvas.height - 2 * PAD);
    ctx.fillStyle = "#e8a94c";
    for (const placed of this.placed) {
      ctx.beginPath();
      ctx.arc(placed.px, placed.py, 4, 0, Math.PI * 2);
      ctx.fill();
    }
  }
}
