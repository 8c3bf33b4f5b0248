/** The mock manager's transition rules are pinned against the same worked
 * examples the backend pins, so UI tests exercise faithful semantics. */

import { describe, expect, it } from "vitest";

import { allSlots } from "../src/types.js";
import { MockManager, makeCatalog } from "./mockManager.js";

function linear(mock: MockManager): (string | null)[] {
  return allSlots(mock.grid).map((s) => mock.occupancy.get(s) ?? null);
}

describe("mock manager semantics", () => {
  it("reorder follows the cascading shift worked example", async () => {
    // [10, 27, 99, 3, _, 7]: moving 27 two slots right shifts the passed
    // entries one position toward the origin -> [10, 99, 3, 27, _, 7]
    const mock = new MockManager({
      grid: { columns: 6, rows: 1 },
      catalog: makeCatalog(),
    });
    mock.occupancy = new Map([
      ["A1", "10"], ["B1", "27"], ["C1", "99"], ["D1", "3"], ["F1", "7"],
    ]);
    await mock.fetch("http://mock/commands/reorder", {
      method: "POST",
      body: JSON.stringify({ from: "B1", to: "D1" }),
    });
    expect(linear(mock)).toEqual(["10", "99", "3", "27", null, "7"]);
  });

  it("swap is an involution and supports empty sides", async () => {
    const mock = new MockManager({
      grid: { columns: 2, rows: 1 },
      catalog: makeCatalog(),
    });
    mock.occupancy = new Map([["A1", "g1"]]);
    const swap = () =>
      mock.fetch("http://mock/commands/swap", {
        method: "POST",
        body: JSON.stringify({ a: "A1", b: "B1" }),
      });
    await swap();
    expect(linear(mock)).toEqual([null, "g1"]);
    await swap();
    expect(linear(mock)).toEqual(["g1", null]);
  });

  it("bulk load is column-first with move semantics", async () => {
    const mock = new MockManager({
      grid: { columns: 2, rows: 2 },
      catalog: makeCatalog(),
    });
    await mock.fetch("http://mock/commands/load", {
      method: "POST",
      body: JSON.stringify({ ids: ["g1", "g2", "g3"] }),
    });
    expect(mock.statePayload().occupancy).toEqual({
      A1: "g1", A2: "g2", B1: "g3",
    });
    // loading g1 again at the head of a different order moves it
    await mock.fetch("http://mock/commands/load", {
      method: "POST",
      body: JSON.stringify({ id: "g1", slot: "B2" }),
    });
    expect(mock.statePayload().occupancy).toEqual({
      A2: "g2", B1: "g3", B2: "g1",
    });
  });

  it("rejects unknown cube ids", async () => {
    const mock = new MockManager({
      grid: { columns: 2, rows: 1 },
      catalog: makeCatalog(),
    });
    const resp = await mock.fetch("http://mock/commands/load", {
      method: "POST",
      body: JSON.stringify({ ids: ["nope"] }),
    });
    expect(resp.status).toBe(400);
  });

  it("clip-only params bodies register as SetClip", async () => {
    const mock = new MockManager({
      grid: { columns: 1, rows: 1 },
      catalog: makeCatalog(),
    });
    await mock.fetch("http://mock/commands/params", {
      method: "POST",
      body: JSON.stringify({ clip_lo: 0.1, clip_hi: 0.9 }),
    });
    expect(mock.actions.at(-1)).toBe("SetClip");
    await mock.fetch("http://mock/commands/params", {
      method: "POST",
      body: JSON.stringify({ opacity_scale: 0.7 }),
    });
    expect(mock.actions.at(-1)).toBe("SetParams");
  });
});
