/** The miniature wall: one cell per screen with column letters A.. across
 * the top and row numbers down the side. Cells select by click or by
 * dragging a rectangle; the bar at the top of an occupied cell drags to
 * another cell to issue a cascading reorder. */

import type { UiGridModel } from "./model.js";
import { allSlots, columnLetters, slotLabel, type StateSnapshot } from "./types.js";

export interface GridCallbacks {
  onSelect(slots: string[]): void;
  onReorder(from: string, to: string): void;
}

interface CellRef {
  slot: string;
  column: number;
  row: number;
  el: HTMLElement;
}

export class MiniatureGrid {
  private cells = new Map<string, CellRef>();
  private rectAnchor: CellRef | null = null;
  private rectCurrent: CellRef | null = null;
  private dragFrom: CellRef | null = null;
  private hovered: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly model: UiGridModel,
    private readonly callbacks: GridCallbacks,
  ) {
    model.onChange((state) => this.render(state));
    // finishing a gesture outside any cell cancels it
    this.root.addEventListener("mouseleave", () => this.cancelGestures());
  }

  render(state: StateSnapshot): void {
    const { columns, rows } = state.grid;
    this.root.textContent = "";
    this.cells.clear();
    const table = document.createElement("table");
    table.className = "wall-grid";
    const head = table.insertRow();
    head.insertCell(); // corner
    for (let c = 0; c < columns; c++) {
      const th = document.createElement("th");
      th.textContent = columnLetters(c);
      head.appendChild(th);
    }
    for (let r = 1; r <= rows; r++) {
      const tr = table.insertRow();
      const th = document.createElement("th");
      th.textContent = String(r);
      tr.appendChild(th);
      for (let c = 0; c < columns; c++) {
        tr.appendChild(this.buildCell(state, c, r));
      }
    }
    this.root.appendChild(table);
  }

  private buildCell(state: StateSnapshot, column: number, row: number): HTMLElement {
    const slot = slotLabel(column, row);
    const td = document.createElement("td");
    td.className = "slot";
    td.dataset.slot = slot;
    const occupant = state.occupancy[slot];
    if (occupant) td.classList.add("occupied");
    if (state.selection.includes(slot)) td.classList.add("selected");
    if (this.hovered === slot) td.classList.add("hovered");

    const bar = document.createElement("div");
    bar.className = "slot-bar";
    td.appendChild(bar);
    const label = document.createElement("div");
    label.className = "slot-id";
    label.textContent = occupant ?? "";
    td.appendChild(label);

    const ref: CellRef = { slot, column, row, el: td };
    this.cells.set(slot, ref);

    bar.addEventListener("mousedown", (ev) => {
      ev.preventDefault();
      ev.stopPropagation();
      if (occupant) {
        this.dragFrom = ref;
        td.classList.add("drag-source");
      }
    });
    td.addEventListener("mousedown", (ev) => {
      ev.preventDefault();
      this.rectAnchor = ref;
      this.rectCurrent = ref;
      this.paintRectangle();
    });
    td.addEventListener("mouseover", () => {
      if (this.rectAnchor) {
        this.rectCurrent = ref;
        this.paintRectangle();
      }
    });
    td.addEventListener("mouseup", () => this.finishGesture(ref));
    return td;
  }

  private rectangleSlots(): string[] {
    if (!this.rectAnchor || !this.rectCurrent || !this.model.state) return [];
    const c0 = Math.min(this.rectAnchor.column, this.rectCurrent.column);
    const c1 = Math.max(this.rectAnchor.column, this.rectCurrent.column);
    const r0 = Math.min(this.rectAnchor.row, this.rectCurrent.row);
    const r1 = Math.max(this.rectAnchor.row, this.rectCurrent.row);
    return allSlots(this.model.state.grid).filter((slot) => {
      const ref = this.cells.get(slot);
      return (
        ref !== undefined &&
        ref.column >= c0 && ref.column <= c1 && ref.row >= r0 && ref.row <= r1
      );
    });
  }

  private paintRectangle(): void {
    const chosen = new Set(this.rectangleSlots());
    for (const ref of this.cells.values()) {
      ref.el.classList.toggle("rect-preview", chosen.has(ref.slot));
    }
  }

  private finishGesture(target: CellRef): void {
    if (this.dragFrom) {
      const from = this.dragFrom;
      this.cancelGestures();
      if (from.slot !== target.slot) {
        this.callbacks.onReorder(from.slot, target.slot);
      }
      return;
    }
    if (this.rectAnchor) {
      const slots = this.rectangleSlots();
      this.cancelGestures();
      this.callbacks.onSelect(slots);
    }
  }

  private cancelGestures(): void {
    this.dragFrom?.el.classList.remove("drag-source");
    this.dragFrom = null;
    this.rectAnchor = null;
    this.rectCurrent = null;
    for (const ref of this.cells.values()) {
      ref.el.classList.remove("rect-preview");
    }
  }

  /** External highlight (scatter hover): outlines the slot immediately. */
  highlight(slot: string | null): void {
    this.hovered = slot;
    for (const ref of this.cells.values()) {
      ref.el.classList.toggle("hovered", ref.slot === slot);
    }
  }

  /** Snapshot of the IDs the DOM shows, keyed by slot (tests compare this
   * against GET /state). */
  domOccupancy(): Record<string, string> {
    const out: Record<string, string> = {};
    for (const ref of this.cells.values()) {
      const text = ref.el.querySelector(".slot-id")?.textContent ?? "";
      if (text) out[ref.slot] = text;
    }
    return out;
  }
}
