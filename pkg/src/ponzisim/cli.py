"""Command-line front end.

Verbs: simulate, scan, chain, continuum, critical, serve.  Every verb
takes a scenario file; failures print a one-line machine-readable error
record to stderr and exit non-zero (2 for config/parameter problems,
3 for numeric failures).
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    ConfigError,
    InvalidParameterError,
    NumericFailureError,
    PonzisimError,
    UnreachableThresholdError,
)
from .runner import (
    chain_scenario,
    chain_payload,
    continuum_scenario,
    critical_payload,
    critical_scenario,
    scan_scenario,
    simulate_scenario,
    surface_payload,
)
from .scenario import load_scenario


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    _write_text(path, text)


def _cmd_simulate(args) -> int:
    config = load_scenario(args.config)
    result = simulate_scenario(config)
    _write_text(args.output, result.csv)
    return 0


def _cmd_scan(args) -> int:
    config = load_scenario(args.config)
    surface = scan_scenario(config)
    lines = ["i\\T," + ",".join(str(int(T)) for T in surface.axis_T)]
    for ii, i_rate in enumerate(surface.axis_i):
        cells = ",".join(str(int(v)) for v in surface.viable[ii])
        lines.append(f"{i_rate:.12g},{cells}")
    _write_text(args.output, "\n".join(lines) + "\n")
    _write_json(args.plot_data, surface_payload(surface))
    return 0


def _cmd_chain(args) -> int:
    config = load_scenario(args.config)
    result = chain_scenario(config)
    _write_json(args.output, chain_payload(result))
    return 0


def _cmd_continuum(args) -> int:
    config = load_scenario(args.config)
    if args.step is not None:
        config.output["step"] = args.step
    result = continuum_scenario(config)
    _write_text(args.output, result.csv)
    return 0


def _cmd_critical(args) -> int:
    config = load_scenario(args.config)
    report = critical_scenario(config)
    _write_json(args.output, critical_payload(report))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(chain_log=args.chain_log)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ponzisim",
        description="Simulate pooled-income investment schemes: population paths, "
                    "capital budgets, critical times, viability scans, chained runs.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="run one scenario and export the series CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-", help="CSV path ('-' for stdout)")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("scan", help="sweep (i, T) cells and export the viability surface")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-", help="grid CSV path")
    p.add_argument("--plot-data", default="scan_plot.json",
                   help="plot-ready JSON path (axes, labels, terminal capital)")
    p.set_defaults(fn=_cmd_scan)

    p = sub.add_parser("chain", help="execute chained runs with endowment hand-off")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-", help="chain JSON path")
    p.set_defaults(fn=_cmd_chain)

    p = sub.add_parser("continuum", help="sample the continuous-time model")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-", help="CSV path")
    p.add_argument("--step", type=float, default=None, help="sample spacing (periods)")
    p.set_defaults(fn=_cmd_continuum)

    p = sub.add_parser("critical", help="report peak / collapse / precipice times")
    p.add_argument("config")
    p.add_argument("-o", "--output", default="-", help="report JSON path")
    p.set_defaults(fn=_cmd_critical)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    p.add_argument("--chain-log", default=None,
                   help="append-only JSONL log of executed chain runs")
    p.set_defaults(fn=_cmd_serve)
    return parser


def _error_record(exc: Exception) -> dict:
    record = {"type": type(exc).__name__, "message": str(exc)}
    details = getattr(exc, "problems", None)
    if details:
        record["details"] = list(details)
    diagnostics = getattr(exc, "diagnostics", None)
    if diagnostics:
        record["diagnostics"] = {k: repr(v) for k, v in diagnostics.items()}
    return {"error": record}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, InvalidParameterError) as exc:
        print(json.dumps(_error_record(exc)), file=sys.stderr)
        return 2
    except (NumericFailureError, UnreachableThresholdError) as exc:
        print(json.dumps(_error_record(exc)), file=sys.stderr)
        return 3
    except PonzisimError as exc:
        print(json.dumps(_error_record(exc)), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
