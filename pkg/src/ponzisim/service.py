"""HTTP service backing the operator console.

Stateless simulation endpoints plus stateful chain sessions:

    GET  /health
    POST /simulate      scenario dict -> series payload (incl. exact CSV text)
    POST /scan          scenario dict (with scan section) -> viability surface
    POST /chain/start   {run, inherit?, N_star?} -> first run result + chain id
    POST /chain/step    {chain_id, run} -> next run result (409 once Red)
    GET  /chain/{id}    full chain state so far

Validation failures return 400 with the per-field problem list; stepping
a collapsed chain returns 409 with the terminal state; unknown sessions
return 404.  Each session is locked while it steps, so concurrent step
requests on one chain serialize; simulation calls are stateless and run
freely in parallel.  Completed runs can be appended to a JSONL audit log.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .errors import ConfigError, InvalidParameterError, PonzisimError
from .recurrent import chain_runs
from .runner import (
    chain_payload,
    run_payload,
    scan_scenario,
    simulate_scenario,
    simulation_payload,
    surface_payload,
)
from .scenario import parse_run_spec, parse_scenario


@dataclass
class ChainSession:
    chain_id: str
    inherit: bool
    specs: list
    result: object = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def locked_red(self) -> bool:
        return self.result is not None and self.result.status == "collapsed"


class ChainStore:
    def __init__(self, log_path=None):
        self._sessions: dict[str, ChainSession] = {}
        self._guard = threading.Lock()
        self._log_path = log_path
        self._log_lock = threading.Lock()

    def create(self, inherit: bool) -> ChainSession:
        session = ChainSession(chain_id=uuid.uuid4().hex, inherit=inherit, specs=[])
        with self._guard:
            self._sessions[session.chain_id] = session
        return session

    def get(self, chain_id: str) -> ChainSession | None:
        with self._guard:
            return self._sessions.get(chain_id)

    def log_run(self, session: ChainSession, run) -> None:
        if self._log_path is None:
            return
        record = {"chain_id": session.chain_id,
                  "index": len(session.result.runs) - 1,
                  "run": run_payload(run)}
        with self._log_lock:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")


def _problem_response(status: int, problems) -> JSONResponse:
    if isinstance(problems, str):
        problems = [problems]
    return JSONResponse(status_code=status,
                        content={"error": {"problems": list(problems)}})


def create_app(chain_log=None) -> FastAPI:
    app = FastAPI(title="ponzisim service")
    store = ChainStore(log_path=chain_log)
    app.state.chains = store

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return _problem_response(400, exc.problems)

    @app.exception_handler(InvalidParameterError)
    async def _param_error(request: Request, exc: InvalidParameterError):
        return _problem_response(400, exc.problems)

    @app.exception_handler(PonzisimError)
    async def _model_error(request: Request, exc: PonzisimError):
        return _problem_response(422, str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/simulate")
    def simulate(body: dict):
        config = parse_scenario(body)
        return simulation_payload(simulate_scenario(config))

    @app.post("/scan")
    def scan(body: dict):
        config = parse_scenario(body)
        return surface_payload(scan_scenario(config))

    @app.post("/chain/start")
    def chain_start(body: dict):
        if not isinstance(body, dict):
            raise ConfigError(["body: expected an object"])
        inherit = body.get("inherit", True)
        if not isinstance(inherit, bool):
            raise ConfigError(["inherit: expected a boolean"])
        problems: list[str] = []
        spec = parse_run_spec(body.get("run"), "run", problems)
        if problems:
            raise ConfigError(problems)
        if spec.demography is None or spec.cap is None:
            raise ConfigError(["run: the first run must carry demography and capital"])
        session = store.create(inherit)
        with session.lock:
            session.specs.append(spec)
            session.result = chain_runs(session.specs, inherit=session.inherit)
            store.log_run(session, session.result.runs[-1])
            return {"chain_id": session.chain_id,
                    "status": session.result.status,
                    "run": run_payload(session.result.runs[-1])}

    @app.post("/chain/step")
    def chain_step(body: dict):
        if not isinstance(body, dict):
            raise ConfigError(["body: expected an object"])
        chain_id = body.get("chain_id")
        session = store.get(chain_id) if isinstance(chain_id, str) else None
        if session is None:
            return JSONResponse(status_code=404,
                                content={"error": {"problems":
                                                   [f"unknown chain id {chain_id!r}"]}})
        problems: list[str] = []
        spec = parse_run_spec(body.get("run", {}), "run", problems)
        if problems:
            raise ConfigError(problems)
        with session.lock:
            if session.locked_red:
                return JSONResponse(
                    status_code=409,
                    content={"error": {"problems": ["chain collapsed; no further runs"]},
                             "chain": chain_payload(session.result, session.chain_id)})
            session.specs.append(spec)
            session.result = chain_runs(session.specs, inherit=session.inherit)
            store.log_run(session, session.result.runs[-1])
            return {"chain_id": session.chain_id,
                    "status": session.result.status,
                    "run": run_payload(session.result.runs[-1])}

    @app.get("/chain/{chain_id}")
    def chain_state(chain_id: str):
        session = store.get(chain_id)
        if session is None:
            return JSONResponse(status_code=404,
                                content={"error": {"problems":
                                                   [f"unknown chain id {chain_id!r}"]}})
        with session.lock:
            return chain_payload(session.result, session.chain_id)

    return app


app = create_app()
