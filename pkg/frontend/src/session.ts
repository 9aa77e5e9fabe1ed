/**
 * Session state machine for the recurrent-run workflow.
 *
 * Edits accumulate in a local draft and hit the service only on an
 * explicit commit (no auto-stepping).  While inheritance is on, the
 * draft's promoter endowment is bound read-only to the previous run's
 * terminal capital as reported by the service, so the displayed next-run
 * K0_pro always equals the last hand-off to the cent.  A Red run (or an
 * explicit stop) locks the session; further commits are refused locally
 * and by the service (409).
 */

import { ApiClient, ChainLockedError } from "./api";
import type { ChainState, RunDraft, RunResult } from "./types";

export type SessionPhase = "idle" | "active" | "locked" | "stopped";

export class SessionLockedError extends Error {
  constructor(readonly reason: "collapsed" | "stopped") {
    super(
      reason === "collapsed"
        ? "chain collapsed; no further runs"
        : "operations paused by the operator",
    );
  }
}

export class SessionController {
  phase: SessionPhase = "idle";
  chainId: string | null = null;
  runs: RunResult[] = [];
  draft: RunDraft;

  constructor(
    private readonly api: ApiClient,
    initialDraft: RunDraft,
    readonly inherit: boolean = true,
  ) {
    this.draft = structuredClone(initialDraft);
  }

  get lastRun(): RunResult | null {
    return this.runs.length ? this.runs[this.runs.length - 1]! : null;
  }

  /** Terminal capital of the last run; the next endowment under inheritance. */
  get nextEndowment(): number | null {
    return this.lastRun ? this.lastRun.light.K_end : null;
  }

  /** True once the draft endowment is service-bound (not editable). */
  get endowmentBound(): boolean {
    return this.inherit && this.runs.length > 0;
  }

  /**
   * The draft as it would be committed: with inheritance on, the
   * endowment field is overridden by the last terminal capital.
   */
  effectiveDraft(): RunDraft {
    const draft = structuredClone(this.draft);
    if (this.endowmentBound && this.nextEndowment !== null) {
      draft.capital.K0_pro = this.nextEndowment;
    }
    return draft;
  }

  updateDraft(patch: Partial<RunDraft>): void {
    if (patch.demography) this.draft.demography = { ...this.draft.demography, ...patch.demography };
    if (patch.capital) this.draft.capital = { ...this.draft.capital, ...patch.capital };
    if (patch.N_star !== undefined) this.draft.N_star = patch.N_star;
    if (patch.label !== undefined) this.draft.label = patch.label;
  }

  /** Commit the current draft as the next run. */
  async commit(): Promise<RunResult> {
    if (this.phase === "locked" || this.phase === "stopped") {
      throw new SessionLockedError(this.phase === "locked" ? "collapsed" : "stopped");
    }
    try {
      const response =
        this.chainId === null
          ? await this.api.chainStart(this.effectiveDraft(), this.inherit)
          : await this.api.chainStep(this.chainId, this.effectiveDraft());
      this.chainId = response.chain_id;
      this.runs.push(response.run);
      this.phase = response.status === "collapsed" ? "locked" : "active";
      return response.run;
    } catch (err) {
      if (err instanceof ChainLockedError) {
        this.phase = "locked";
        if (err.chain) this.absorb(err.chain);
      }
      throw err;
    }
  }

  /** Pause operations: part of the strategic toolkit, locks commits. */
  stop(): void {
    if (this.phase === "active" || this.phase === "idle") {
      this.phase = "stopped";
    }
  }

  /** Re-read the full chain state from the service. */
  async refresh(): Promise<ChainState | null> {
    if (this.chainId === null) return null;
    const state = await this.api.chainState(this.chainId);
    this.absorb(state);
    return state;
  }

  private absorb(state: ChainState): void {
    this.runs = state.runs;
    if (state.status === "collapsed") this.phase = "locked";
  }
}
