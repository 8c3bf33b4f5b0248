/** Boots the full controller app against a MockManager inside jsdom. */

import { ControllerApp } from "../src/main.js";
import { MockManager, makeCatalog, type MockOptions } from "./mockManager.js";

export const PAGE_SKELETON = `
  <header><span id="status"></span></header>
  <div id="grid"></div>
  <div class="actions">
    <button id="btn-load"></button>
    <button id="btn-unload"></button>
    <button id="btn-swap"></button>
    <button id="btn-query"></button>
  </div>
  <div id="catalog"></div>
  <div id="histogram"></div>
  <select id="scatter-x"></select>
  <select id="scatter-y"><option value="mean">mean</option></select>
  <div id="scatter"></div>
  <div id="scene"></div>
  <div id="wall"></div>
`;

export async function bootApp(
  options?: Partial<MockOptions>,
): Promise<{ app: ControllerApp; mock: MockManager }> {
  document.body.innerHTML = PAGE_SKELETON;
  const mock = new MockManager({
    grid: options?.grid ?? { columns: 6, rows: 1 },
    catalog: options?.catalog ?? makeCatalog(),
  });
  const app = new ControllerApp(document, "http://mock", mock.fetch);
  await app.start();
  app.wall.stop(); // no interval noise in tests
  return { app, mock };
}

export function mouse(
  el: Element,
  type: string,
  init: MouseEventInit = {},
): void {
  el.dispatchEvent(new MouseEvent(type, { bubbles: true, ...init }));
}

export function cell(slot: string): HTMLElement {
  const el = document.querySelector(`td.slot[data-slot="${slot}"]`);
  if (!el) throw new Error(`no cell for ${slot}`);
  return el as HTMLElement;
}

export function cellBar(slot: string): HTMLElement {
  const bar = cell(slot).querySelector(".slot-bar");
  if (!bar) throw new Error(`no bar for ${slot}`);
  return bar as HTMLElement;
}

export function domOccupancyOf(app: ControllerApp): Record<string, string> {
  return app.grid.domOccupancy();
}
