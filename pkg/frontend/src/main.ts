/** Wires the controller together against a manager base URL. Exported as a
 * class so tests can boot the full app against an in-memory manager. */

import { ManagerApi, type FetchLike } from "./api.js";
import { CatalogTable } from "./catalogTable.js";
import { MiniatureGrid } from "./grid.js";
import { HistogramPanel } from "./histogram.js";
import { UiGridModel } from "./model.js";
import { ScatterPanel } from "./scatter.js";
import { SceneController } from "./scene.js";
import { FrameWall } from "./wall.js";

export class ControllerApp {
  readonly api: ManagerApi;
  readonly model: UiGridModel;
  readonly grid: MiniatureGrid;
  readonly catalog: CatalogTable;
  readonly histogram: HistogramPanel;
  readonly scatter: ScatterPanel;
  readonly scene: SceneController;
  readonly wall: FrameWall;

  constructor(
    readonly root: Document | HTMLElement,
    baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.api = new ManagerApi(baseUrl, fetchFn);
    this.model = new UiGridModel(this.api);

    const el = (id: string): HTMLElement => {
      const node = (this.root as Document).querySelector
        ? (this.root as Document).querySelector(`#${id}`)
        : null;
      if (!node) throw new Error(`missing #${id} in the page skeleton`);
      return node as HTMLElement;
    };

    this.grid = new MiniatureGrid(el("grid"), this.model, {
      onSelect: (slots) => void this.model.command(() => this.api.select(slots)),
      onReorder: (from, to) =>
        void this.model.command(() => this.api.reorder(from, to)),
    });
    this.catalog = new CatalogTable(el("catalog"), {
      onLoad: (ids, sort) =>
        void this.model.command(() => this.api.loadIds(ids, sort)),
    });
    this.histogram = new HistogramPanel(el("histogram"), this.api, {
      onClip: (lo, hi) =>
        void this.model.command(() => this.api.setClip(lo, hi)),
    });
    this.scatter = new ScatterPanel(el("scatter"), this.api, {
      onHighlight: (slot) => this.grid.highlight(slot),
      onSelect: (slots) => void this.model.command(() => this.api.select(slots)),
    });
    this.scene = new SceneController(el("scene"), this.api, {
      onCamera: (values) =>
        void this.model.command(() => this.api.camera(values)),
      onParams: (values) =>
        void this.model.command(() => this.api.params(values)),
    });
    this.wall = new FrameWall(el("wall"), this.api);

    this.model.onChange((state) => {
      this.wall.render(state);
      this.scene.syncFrom(state);
      const status = el("status");
      status.textContent = `seq ${state.seq} · ${Object.keys(state.occupancy).length} loaded`;
    });

    el("btn-load").addEventListener("click", () => this.catalog.requestLoad());
    el("btn-unload").addEventListener("click", () => {
      const slots = this.model.state?.selection ?? [];
      if (slots.length) {
        void this.model.command(() => this.api.unload(slots));
      }
    });
    el("btn-swap").addEventListener("click", () => {
      const slots = this.model.state?.selection ?? [];
      if (slots.length === 2) {
        void this.model.command(() => this.api.swap(slots[0], slots[1]));
      }
    });
    el("btn-query").addEventListener("click", () => {
      const selected = this.model.state?.selection ?? [];
      const slot = selected.length === 1 ? selected[0] : null;
      void this.histogram.show(slot);
      void this.scene.loadAtlas(slot && this.model.occupant(slot) ? slot : null);
      const x = el("scatter-x") as HTMLSelectElement;
      const y = el("scatter-y") as HTMLSelectElement;
      if (x.value) void this.scatter.show(x.value, y.value || "mean");
    });
  }

  /** Initial load: state + catalog, then start frame polling. */
  async start(): Promise<void> {
    await this.model.sync();
    const catalog = await this.api.catalog();
    this.catalog.setCatalog(catalog);
    const xSel = (this.root as Document).querySelector(
      "#scatter-x",
    ) as HTMLSelectElement | null;
    if (xSel && !xSel.options.length) {
      for (const column of catalog.columns) {
        const opt = document.createElement("option");
        opt.value = column;
        opt.textContent = column;
        xSel.appendChild(opt);
      }
    }
    this.wall.start();
  }

  /** Wait until every issued command has been acknowledged and re-synced. */
  idle(): Promise<void> {
    return this.model.idle();
  }
}

declare global {
  interface Window {
    cubewallApp?: ControllerApp;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  const boot = () => {
    if (!document.querySelector("#grid")) return; // not the controller page
    const base =
      new URLSearchParams(window.location.search).get("manager") ??
      window.location.origin;
    const app = new ControllerApp(document, base);
    window.cubewallApp = app;
    void app.start();
  };
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", boot);
  } else {
    boot();
  }
}
