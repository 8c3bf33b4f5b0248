/** The frame wall surrogate: a grid of live panel images polled from the
 * manager's frame proxy with ETags (unchanged frames answer 304, so idle
 * polling is cheap). Selected screens get the highlight border; screens
 * whose poll fails are marked stale. */

import type { ManagerApi } from "./api.js";
import { allSlots, type StateSnapshot } from "./types.js";

const POLL_MS = 500;

interface WallCell {
  el: HTMLElement;
  img: HTMLImageElement;
  etag: string | null;
  objectUrl: string | null;
}

export class FrameWall {
  private cells = new Map<string, WallCell>();
  private timer: ReturnType<typeof setInterval> | null = null;
  private polling = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ManagerApi,
  ) {}

  render(state: StateSnapshot): void {
    const wanted = allSlots(state.grid);
    if (wanted.length !== this.cells.size) {
      this.root.textContent = "";
      this.cells.clear();
      this.root.style.setProperty("--wall-columns", String(state.grid.columns));
      for (const slot of wanted) {
        const el = document.createElement("figure");
        el.className = "wall-cell";
        el.dataset.slot = slot;
        const img = document.createElement("img");
        img.alt = slot;
        const caption = document.createElement("figcaption");
        caption.textContent = slot;
        el.appendChild(img);
        el.appendChild(caption);
        this.root.appendChild(el);
        this.cells.set(slot, { el, img, etag: null, objectUrl: null });
      }
    }
    for (const [slot, cell] of this.cells) {
      cell.el.classList.toggle("selected", state.selection.includes(slot));
      cell.el.classList.toggle("occupied", slot in state.occupancy);
    }
  }

  start(): void {
    if (this.timer === null) {
      this.timer = setInterval(() => void this.poll(), POLL_MS);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async poll(): Promise<void> {
    if (this.polling) return; // never overlap poll rounds
    this.polling = true;
    try {
      for (const [slot, cell] of this.cells) {
        try {
          const frame = await this.api.fetchFrame(slot, cell.etag);
          if (frame.status === 304) {
            cell.el.classList.remove("stale");
            continue;
          }
          if (frame.status === 200 && frame.blob) {
            cell.etag = frame.etag;
            cell.el.classList.remove("stale");
            if (typeof URL.createObjectURL === "function") {
              const next = URL.createObjectURL(frame.blob);
              if (cell.objectUrl) URL.revokeObjectURL(cell.objectUrl);
              cell.objectUrl = next;
              cell.img.src = next;
            }
          } else {
            cell.el.classList.add("stale");
          }
        } catch {
          cell.el.classList.add("stale");
        }
      }
    } finally {
      this.polling = false;
    }
  }
}
