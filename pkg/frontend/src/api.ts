/** Typed client for the manager HTTP API. The fetch function is injectable
 * so tests can run against an in-memory manager. */

import type {
  CatalogPayload,
  CommandResult,
  HistogramResult,
  ScatterResult,
  SortSpec,
  StateSnapshot,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ManagerApi {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.base + path);
    return (await resp.json()) as T;
  }

  private async postJson(path: string, body: unknown): Promise<CommandResult> {
    const resp = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await resp.json()) as CommandResult;
  }

  state(): Promise<StateSnapshot> {
    return this.getJson("/state");
  }

  catalog(): Promise<CatalogPayload> {
    return this.getJson("/catalog");
  }

  loadIds(ids: string[], sort?: SortSpec): Promise<CommandResult> {
    const body: Record<string, unknown> = { ids };
    if (sort && sort.length) body.sort = sort;
    return this.postJson("/commands/load", body);
  }

  loadOne(id: string, slot: string): Promise<CommandResult> {
    return this.postJson("/commands/load", { id, slot });
  }

  unload(slots: string[]): Promise<CommandResult> {
    return this.postJson("/commands/unload", { slots });
  }

  swap(a: string, b: string): Promise<CommandResult> {
    return this.postJson("/commands/swap", { a, b });
  }

  reorder(from: string, to: string): Promise<CommandResult> {
    return this.postJson("/commands/reorder", { from, to });
  }

  select(slots: string[]): Promise<CommandResult> {
    return this.postJson("/commands/select", { slots });
  }

  camera(values: Partial<StateSnapshot["camera"]>): Promise<CommandResult> {
    return this.postJson("/commands/camera", values);
  }

  params(values: Partial<StateSnapshot["params"]>): Promise<CommandResult> {
    return this.postJson("/commands/params", values);
  }

  setClip(lo: number, hi: number): Promise<CommandResult> {
    return this.postJson("/commands/params", { clip_lo: lo, clip_hi: hi });
  }

  histogram(
    slot: string,
    bins: number,
    clip?: [number, number],
  ): Promise<HistogramResult> {
    let path = `/query/histogram?slot=${encodeURIComponent(slot)}&bins=${bins}`;
    if (clip) path += `&lo=${clip[0]}&hi=${clip[1]}`;
    return this.getJson(path);
  }

  scatter(xField: string, yStat: string): Promise<ScatterResult> {
    return this.getJson(
      `/query/scatter?x=${encodeURIComponent(xField)}&y=${encodeURIComponent(yStat)}`,
    );
  }

  checkpoint(name: string): Promise<CommandResult> {
    return this.postJson("/session/checkpoint", { name });
  }

  replay(upto: number | string | null): Promise<CommandResult> {
    return this.postJson("/session/replay", { upto });
  }

  frameUrl(slot: string): string {
    return `${this.base}/frames/${slot}`;
  }

  atlasUrl(slot: string): string {
    return `${this.base}/atlas/${slot}`;
  }

  async atlasDescriptor(
    slot: string,
  ): Promise<{ nx: number; ny: number; nz: number; tilesX: number } | null> {
    try {
      const resp = await this.fetchFn(`${this.atlasUrl(slot)}/descriptor`);
      if (!resp.ok) return null;
      return await resp.json();
    } catch {
      return null;
    }
  }

  async fetchFrame(
    slot: string,
    etag: string | null,
  ): Promise<{ status: number; etag: string | null; blob: Blob | null }> {
    const headers: Record<string, string> = {};
    if (etag) headers["If-None-Match"] = etag;
    const resp = await this.fetchFn(this.frameUrl(slot), { headers });
    if (resp.status === 304) return { status: 304, etag, blob: null };
    return {
      status: resp.status,
      etag: resp.headers.get("ETag"),
      blob: resp.status === 200 ? await resp.blob() : null,
    };
  }
}
