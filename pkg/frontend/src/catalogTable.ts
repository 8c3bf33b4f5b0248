/** The dataset viewer: every metadata category is a column; clicking a
 * header cycles ascending -> descending -> off, shift-click appends the
 * column as a further sort key. Sorting happens client-side with the same
 * rules the manager uses (numeric columns compare numerically, text by code
 * point, empty cells last regardless of direction, stable ties). */

import type {
  CatalogEntry,
  CatalogPayload,
  SortDirection,
  SortSpec,
} from "./types.js";

export function compareCells(
  a: string,
  b: string,
  numeric: boolean,
  descending: boolean,
): number {
  const aEmpty = a.trim() === "";
  const bEmpty = b.trim() === "";
  if (aEmpty || bEmpty) {
    if (aEmpty && bEmpty) return 0;
    return aEmpty ? 1 : -1; // empties last either way
  }
  let sign: number;
  if (numeric) {
    const fa = parseFloat(a);
    const fb = parseFloat(b);
    sign = fa < fb ? -1 : fa > fb ? 1 : 0;
  } else {
    sign = a < b ? -1 : a > b ? 1 : 0;
  }
  return descending ? -sign : sign;
}

export function sortEntries(
  catalog: CatalogPayload,
  spec: SortSpec,
): CatalogEntry[] {
  const numeric = new Set(catalog.numeric_columns);
  const position = new Map(catalog.entries.map((e, i) => [e.id, i]));
  const ordered = [...catalog.entries];
  ordered.sort((x, y) => {
    for (const [field, direction] of spec) {
      const c = compareCells(
        x.values[field] ?? "",
        y.values[field] ?? "",
        numeric.has(field),
        direction === "descending",
      );
      if (c !== 0) return c;
    }
    return (position.get(x.id) ?? 0) - (position.get(y.id) ?? 0); // stable
  });
  return ordered;
}

export interface CatalogCallbacks {
  onLoad(ids: string[], sort: SortSpec): void;
}

export class CatalogTable {
  catalog: CatalogPayload | null = null;
  sortSpec: SortSpec = [];
  private checked = new Set<string>();

  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: CatalogCallbacks,
  ) {}

  setCatalog(catalog: CatalogPayload): void {
    this.catalog = catalog;
    this.render();
  }

  /** IDs currently ticked, in displayed (sorted) order. */
  selectedIds(): string[] {
    return this.displayedEntries()
      .filter((e) => this.checked.has(e.id))
      .map((e) => e.id);
  }

  displayedEntries(): CatalogEntry[] {
    if (!this.catalog) return [];
    return sortEntries(this.catalog, this.sortSpec);
  }

  cycleSort(field: string, additive: boolean): void {
    const existing = this.sortSpec.findIndex(([f]) => f === field);
    let next: SortSpec = additive ? [...this.sortSpec] : [];
    if (existing >= 0) {
      const [, direction] = this.sortSpec[existing];
      next = additive ? next.filter(([f]) => f !== field) : [];
      if (direction === "ascending") next.push([field, "descending"]);
      // descending -> drop the key entirely
    } else {
      next.push([field, "ascending"]);
    }
    this.sortSpec = next;
    this.render();
  }

  requestLoad(): void {
    const ids = this.selectedIds();
    if (ids.length) this.callbacks.onLoad(ids, this.sortSpec);
  }

  private sortMarker(field: string): string {
    const index = this.sortSpec.findIndex(([f]) => f === field);
    if (index < 0) return "";
    const arrow = this.sortSpec[index][1] === "ascending" ? "↑" : "↓";
    return this.sortSpec.length > 1 ? `${arrow}${index + 1}` : arrow;
  }

  render(): void {
    this.root.textContent = "";
    if (!this.catalog) return;
    const table = document.createElement("table");
    table.className = "catalog-table";
    const head = table.insertRow();
    head.insertCell(); // checkbox column
    for (const column of this.catalog.columns) {
      const th = document.createElement("th");
      th.dataset.field = column;
      th.textContent = `${column} ${this.sortMarker(column)}`.trim();
      th.addEventListener("click", (ev) =>
        this.cycleSort(column, ev.shiftKey),
      );
      head.appendChild(th);
    }
    for (const entry of this.displayedEntries()) {
      const tr = table.insertRow();
      tr.dataset.id = entry.id;
      if (this.checked.has(entry.id)) tr.classList.add("checked");
      const cell = tr.insertCell();
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = this.checked.has(entry.id);
      box.addEventListener("change", () => {
        if (box.checked) this.checked.add(entry.id);
        else this.checked.delete(entry.id);
        tr.classList.toggle("checked", box.checked);
      });
      cell.appendChild(box);
      for (const column of this.catalog.columns) {
        const td = tr.insertCell();
        td.textContent = entry.values[column] ?? "";
      }
    }
    this.root.appendChild(table);
  }
}
