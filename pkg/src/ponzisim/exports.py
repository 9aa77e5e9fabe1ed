"""Deterministic series export.

One fixed 10-column layout for every model; floats printed with 12
significant digits so identical inputs yield byte-identical files.  The
traffic label appears on the terminal row only.
"""

from __future__ import annotations

from .capital import CapitalPath
from .criticality import TrafficLight
from .demography import PopulationPath

SERIES_COLUMNS = (
    "t", "N_t", "dN_in", "dN_out", "K_t",
    "agg_interest", "agg_deposits", "agg_coupons", "agg_withdrawals",
    "traffic_label",
)


def format_number(x: float) -> str:
    return format(float(x), ".12g")


def series_rows(pop: PopulationPath, path: CapitalPath,
                light: TrafficLight | None) -> list[list[str]]:
    """Rows from t = 0 through the termination index."""
    end = path.termination_index
    rows = []
    for t in range(end + 1):
        rows.append([
            str(t),
            format_number(pop.active[t]),
            format_number(pop.entering[t]),
            format_number(pop.exiting[t]),
            format_number(path.capital[t]),
            format_number(path.agg_interest[t]),
            format_number(path.agg_deposits[t]),
            format_number(path.agg_coupons[t]),
            format_number(path.agg_withdrawals[t]),
            light.label if (light is not None and t == end) else "",
        ])
    return rows


def continuum_rows(samples: list[dict], label: str) -> list[list[str]]:
    """Rows for the continuous model; ``samples`` carry per-time dicts
    from the runner (t, population, flows, aggregates)."""
    rows = []
    for idx, s in enumerate(samples):
        terminal = idx == len(samples) - 1
        rows.append([
            format_number(s["t"]),
            format_number(s["N_t"]),
            format_number(s["dN_in"]),
            format_number(s["dN_out"]),
            format_number(s["K_t"]),
            format_number(s["agg_interest"]),
            format_number(s["agg_deposits"]),
            format_number(s["agg_coupons"]),
            format_number(s["agg_withdrawals"]),
            label if terminal else "",
        ])
    return rows


def render_csv(rows: list[list[str]], columns=SERIES_COLUMNS) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"
