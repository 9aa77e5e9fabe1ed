/**
 * DOM wiring for the operator console.  One session per tab; every state
 * change round-trips the service (optimistic updates are off by design).
 */

import { ApiClient } from "./api";
import { chartScales, runBoundaryMarkers, stepLinePath, zeroLine } from "./chart";
import { formatCents, formatPeriods, formatRate } from "./format";
import { buildHeatmap, cellClass, type HeatmapCell } from "./heatmap";
import { SessionController, SessionLockedError } from "./session";
import type { RunDraft, RunResult } from "./types";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8750";

const DEFAULT_DRAFT: RunDraft = {
  demography: { N0: 10, N: 1000, n: 0.1, T: 5 },
  capital: { K0_pro: 100, I0: 3, r: 0.052, i: 0.03 },
  N_star: 0.99,
  label: "run 1",
};

const api = new ApiClient(SERVICE_URL);
const session = new SessionController(api, DEFAULT_DRAFT);

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const fields: Record<string, HTMLInputElement> = {};
for (const name of ["N0", "N", "n", "T", "K0_pro", "I0", "r", "i", "N_star", "label"]) {
  fields[name] = el<HTMLInputElement>(`field-${name}`);
}

function readDraft(): void {
  session.updateDraft({
    demography: {
      N0: Number(fields.N0!.value),
      N: Number(fields.N!.value),
      n: Number(fields.n!.value),
      T: Number(fields.T!.value),
    },
    capital: {
      K0_pro: Number(fields.K0_pro!.value),
      I0: Number(fields.I0!.value),
      r: Number(fields.r!.value),
      i: Number(fields.i!.value),
    },
    N_star: Number(fields.N_star!.value),
    label: fields.label!.value,
  });
}

function renderDraft(): void {
  const draft = session.effectiveDraft();
  fields.N0!.value = String(draft.demography.N0);
  fields.N!.value = String(draft.demography.N);
  fields.n!.value = String(draft.demography.n);
  fields.T!.value = String(draft.demography.T);
  fields.K0_pro!.value = String(draft.capital.K0_pro);
  fields.I0!.value = String(draft.capital.I0);
  fields.r!.value = String(draft.capital.r);
  fields.i!.value = String(draft.capital.i);
  fields.N_star!.value = String(draft.N_star);
  fields.label!.value = draft.label;
  // endowment is service-bound after the first run: display only
  fields.K0_pro!.disabled = session.endowmentBound;
  el<HTMLDivElement>("endowment-note").textContent = session.endowmentBound
    ? `inherited from ${session.lastRun?.label || "previous run"}: ${formatCents(
        session.nextEndowment ?? 0,
      )}`
    : "";
}

function runCard(run: RunResult, index: number): HTMLElement {
  const card = document.createElement("div");
  card.className = `run-card light-${run.light.label.toLowerCase()}`;
  card.innerHTML = `
    <h3>#${index + 1} ${run.label || "(unnamed)"} — ${run.light.label}</h3>
    <dl>
      <dt>endowment</dt><dd>${formatCents(run.capital.K0_pro)}</dd>
      <dt>terminal capital</dt><dd>${formatCents(run.light.K_end)}</dd>
      <dt>stops at</dt><dd>t* = ${formatPeriods(run.t_star)}</dd>
      <dt>rates</dt><dd>n=${formatRate(run.demography.n)}, r=${formatRate(
        run.capital.r,
      )}, i=${formatRate(run.capital.i)}, T=${run.demography.T}</dd>
    </dl>`;
  return card;
}

function renderRuns(): void {
  const host = el<HTMLDivElement>("run-cards");
  host.replaceChildren(...session.runs.map(runCard));
}

async function renderChart(): Promise<void> {
  if (!session.chainId) return;
  const state = await session.refresh();
  if (!state || state.global_times.length === 0) return;
  const geo = { width: 720, height: 260, pad: 28 };
  const scales = chartScales(state.global_times, state.global_capital, geo);
  el<HTMLElement>("chart-path").setAttribute(
    "d",
    stepLinePath(state.global_times, state.global_capital, scales),
  );
  const zero = zeroLine(scales);
  const zeroEl = el<HTMLElement>("chart-zero");
  zeroEl.setAttribute("x1", String(geo.pad));
  zeroEl.setAttribute("x2", String(geo.width - geo.pad));
  zeroEl.setAttribute("y1", String(zero));
  zeroEl.setAttribute("y2", String(zero));
  const marks = runBoundaryMarkers(state.global_time_offsets, scales)
    .map(
      (x) =>
        `<line x1="${x.toFixed(2)}" y1="${geo.pad}" x2="${x.toFixed(2)}" y2="${
          geo.height - geo.pad
        }" class="run-boundary"/>`,
    )
    .join("");
  el<HTMLElement>("chart-boundaries").innerHTML = marks;
}

function renderPhase(): void {
  const banner = el<HTMLDivElement>("phase-banner");
  banner.className = `banner phase-${session.phase}`;
  banner.textContent = {
    idle: "no runs committed yet",
    active: "session active — edit the draft and commit the next run",
    locked: "chain collapsed (Red) — session locked, no prospect of a bailout",
    stopped: "operations paused by the operator",
  }[session.phase];
  const commitDisabled = session.phase === "locked" || session.phase === "stopped";
  el<HTMLButtonElement>("commit").disabled = commitDisabled;
}

function showError(problems: string[]): void {
  el<HTMLDivElement>("errors").textContent = problems.join(" | ");
}

async function commit(): Promise<void> {
  showError([]);
  readDraft();
  try {
    await session.commit();
  } catch (err) {
    if (err instanceof SessionLockedError) {
      showError([err.message]);
    } else if (err instanceof Error && "problems" in err) {
      showError((err as { problems: string[] }).problems);
    } else {
      showError([String(err)]);
    }
  }
  renderRuns();
  renderPhase();
  renderDraft();
  await renderChart();
}

async function whatIf(): Promise<void> {
  showError([]);
  readDraft();
  const draft = session.effectiveDraft();
  const center = draft.capital.i;
  const iGrid = [0, 0.01, 0.02, 0.03, 0.04, 0.05];
  if (!iGrid.includes(center)) iGrid.push(center);
  iGrid.sort((a, b) => a - b);
  const tGrid = Array.from({ length: 12 }, (_, k) => k + 1);
  try {
    const surface = await api.scan({
      demography: draft.demography,
      capital: draft.capital,
      N_star: draft.N_star,
      i_grid: iGrid,
      T_grid: tGrid,
    });
    renderHeatmap(buildHeatmap(surface));
  } catch (err) {
    if (err instanceof Error && "problems" in err) {
      showError((err as { problems: string[] }).problems);
    } else {
      showError([String(err)]);
    }
  }
}

function renderHeatmap(cells: HeatmapCell[][]): void {
  const table = el<HTMLTableElement>("heatmap");
  const firstRow = cells[0] ?? [];
  const header =
    "<tr><th>i \\ T</th>" +
    firstRow.map((c) => `<th>${c.T}</th>`).join("") +
    "</tr>";
  const rows = cells
    .map(
      (row, ii) =>
        `<tr><th>${formatRate(row[0]?.i ?? 0)}</th>` +
        row
          .map(
            (cell, ti) =>
              `<td class="${cellClass(cell.label)}" data-ii="${ii}" data-ti="${ti}" ` +
              `title="K(t*) = ${formatCents(cell.terminalCapital)}">${cell.label[0]}</td>`,
          )
          .join("") +
        "</tr>",
    )
    .join("");
  table.innerHTML = header + rows;
  table.querySelectorAll("td").forEach((td) => {
    td.addEventListener("click", () => {
      const cell = cells[Number(td.dataset.ii)]?.[Number(td.dataset.ti)];
      if (!cell) return;
      session.updateDraft({
        demography: { ...session.draft.demography, T: cell.T },
        capital: { ...session.draft.capital, i: cell.i },
      });
      renderDraft();
    });
  });
}

el<HTMLButtonElement>("commit").addEventListener("click", () => void commit());
el<HTMLButtonElement>("what-if").addEventListener("click", () => void whatIf());
el<HTMLButtonElement>("stop").addEventListener("click", () => {
  session.stop();
  renderPhase();
});

renderDraft();
renderPhase();
void api
  .health()
  .then(() => showError([]))
  .catch(() => showError([`service unreachable at ${SERVICE_URL}`]));
