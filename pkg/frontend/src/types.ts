/**
 * Wire types mirroring the service payloads.  The console renders these
 * verbatim; every number on screen originates from a service response.
 */

export interface DemographyBlock {
  N0: number;
  N: number;
  n: number;
  T: number;
}

export interface CapitalBlock {
  K0_pro: number;
  I0: number;
  r: number;
  i: number;
}

/** Draft of the next run, edited locally until committed. */
export interface RunDraft {
  demography: DemographyBlock;
  capital: CapitalBlock;
  N_star: number;
  label: string;
}

export type TrafficLabel = "Red" | "Yellow" | "Green";

export interface TrafficLight {
  label: TrafficLabel;
  K_end: number;
  bound_upper: number;
  t_end: number;
}

/** One executed run as reported by /chain endpoints. */
export interface RunResult {
  label: string;
  demography: DemographyBlock;
  capital: CapitalBlock;
  N_star: number;
  t_star: number;
  offset: number;
  light: TrafficLight;
  collapse_time: number | null;
}

export type ChainStatus = "completed" | "collapsed";

export interface ChainState {
  chain_id?: string;
  status: ChainStatus;
  inherit: boolean;
  runs: RunResult[];
  global_time_offsets: number[];
  global_times: number[];
  global_capital: number[];
}

export interface StepResponse {
  chain_id: string;
  status: ChainStatus;
  run: RunResult;
}

/** Viability surface from POST /scan. */
export interface ScanSurface {
  axis_i: number[];
  axis_T: number[];
  viable: number[][];
  labels: TrafficLabel[][];
  terminal_capital: number[][];
  N_star: number;
}

export interface ErrorBody {
  error: { problems: string[] };
  chain?: ChainState;
}
