/** Mirror of the manager's global state.
 *
 * The rendered grid always reflects the last acknowledged server state:
 * every command round-trips through the manager and then re-fetches /state,
 * so optimistic UI state never leaks into the grid (a failed command simply
 * re-syncs, which is the rollback).
 */

import type { ManagerApi } from "./api.js";
import type { CommandResult, StateSnapshot } from "./types.js";

export type StateListener = (state: StateSnapshot) => void;

export class UiGridModel {
  state: StateSnapshot | null = null;
  pending = false;
  lastError: string | null = null;

  private listeners: StateListener[] = [];
  private chain: Promise<unknown> = Promise.resolve();

  constructor(private readonly api: ManagerApi) {}

  onChange(listener: StateListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    if (this.state) {
      for (const listener of this.listeners) listener(this.state);
    }
  }

  async sync(): Promise<StateSnapshot> {
    const state = await this.api.state();
    this.state = state;
    this.emit();
    return state;
  }

  /** Run one command, then re-sync; commands are serialized client-side. */
  command(run: () => Promise<CommandResult>): Promise<CommandResult> {
    const task = this.chain.then(async () => {
      this.pending = true;
      try {
        const result = await run();
        this.lastError = result.ok
          ? null
          : (result.error?.message ?? "command failed");
        await this.sync();
        return result;
      } catch (exc) {
        this.lastError = String(exc);
        await this.sync().catch(() => undefined);
        return { ok: false, error: { code: "unreachable", message: String(exc) } };
      } finally {
        this.pending = false;
      }
    });
    this.chain = task.catch(() => undefined);
    return task;
  }

  /** Resolves when every command issued so far has been acknowledged. */
  idle(): Promise<void> {
    return this.chain.then(() => undefined);
  }

  occupant(slot: string): string | null {
    return this.state?.occupancy[slot] ?? null;
  }

  isSelected(slot: string): boolean {
    return this.state?.selection.includes(slot) ?? false;
  }
}
