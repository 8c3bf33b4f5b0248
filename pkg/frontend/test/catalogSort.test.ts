/** Client-side sorting must follow the manager's rules: numeric columns
 * compare numerically, text by code point, empty cells last regardless of
 * direction, ties keep file order. */

import { describe, expect, it } from "vitest";

import { compareCells, sortEntries } from "../src/catalogTable.js";
import { makeCatalog } from "./mockManager.js";

describe("catalog sorting", () => {
  it("empty spec keeps file order", () => {
    const catalog = makeCatalog();
    expect(sortEntries(catalog, []).map((e) => e.id)).toEqual(
      catalog.entries.map((e) => e.id),
    );
  });

  it("numeric ascending with empties last", () => {
    const ids = sortEntries(makeCatalog(), [["dist", "ascending"]]).map(
      (e) => e.id,
    );
    expect(ids).toEqual(["g6", "g3", "g2", "g4", "g1", "g5"]);
  });

  it("numeric descending still puts empties last", () => {
    const ids = sortEntries(makeCatalog(), [["dist", "descending"]]).map(
      (e) => e.id,
    );
    expect(ids).toEqual(["g1", "g4", "g2", "g3", "g6", "g5"]);
  });

  it("two keys: text asc then numeric desc, stable beyond keys", () => {
    const ids = sortEntries(makeCatalog(), [
      ["type", "ascending"],
      ["dist", "descending"],
    ]).map((e) => e.id);
    // dwarfs: g4 (3.0), g2 (2.0), g6 (0.5); spirals: g1 (4.0), g3 (1.5),
    // g5 (empty -> last among spirals)
    expect(ids).toEqual(["g4", "g2", "g6", "g1", "g3", "g5"]);
  });

  it("text comparison is by code point", () => {
    expect(compareCells("B", "a", false, false)).toBeLessThan(0); // "B" < "a"
    expect(compareCells("b", "a", false, true)).toBeLessThan(0); // descending
  });

  it("ties preserve file order (stability)", () => {
    const catalog = makeCatalog();
    const ids = sortEntries(catalog, [["type", "ascending"]]).map((e) => e.id);
    expect(ids).toEqual(["g2", "g4", "g6", "g1", "g3", "g5"]);
  });
});
