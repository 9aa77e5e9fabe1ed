/**
 * Thin typed client for the simulation service.  All model math happens
 * server-side; this module only moves JSON.
 */

import type {
  CapitalBlock,
  ChainState,
  DemographyBlock,
  ErrorBody,
  RunDraft,
  ScanSurface,
  StepResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly problems: string[],
  ) {
    super(problems.join("; ") || `HTTP ${status}`);
  }
}

/** 409 from /chain/step: the chain went Red and accepts no further runs. */
export class ChainLockedError extends ApiError {
  constructor(
    status: number,
    problems: string[],
    readonly chain: ChainState | null,
  ) {
    super(status, problems);
  }
}

export interface ScanRequest {
  demography: DemographyBlock;
  capital: CapitalBlock;
  N_star: number;
  i_grid: number[];
  T_grid: number[];
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as T | ErrorBody;
    if (!response.ok) {
      const err = payload as ErrorBody;
      const problems = err?.error?.problems ?? [`HTTP ${response.status}`];
      if (response.status === 409) {
        throw new ChainLockedError(response.status, problems, err?.chain ?? null);
      }
      throw new ApiError(response.status, problems);
    }
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  scan(req: ScanRequest): Promise<ScanSurface> {
    return this.request("POST", "/scan", {
      schema_version: 1,
      model: "quasi_logistic",
      demography: req.demography,
      capital: req.capital,
      N_star: req.N_star,
      scan: { i_grid: req.i_grid, T_grid: req.T_grid },
    });
  }

  chainStart(run: RunDraft, inherit: boolean): Promise<StepResponse> {
    return this.request("POST", "/chain/start", { inherit, run });
  }

  chainStep(chainId: string, run: Partial<RunDraft>): Promise<StepResponse> {
    return this.request("POST", "/chain/step", { chain_id: chainId, run });
  }

  chainState(chainId: string): Promise<ChainState> {
    return this.request("GET", `/chain/${chainId}`);
  }
}
