"""HTTP JSON API over the synthesis pipeline.

POST /synthesize  {query, env, output_name, expected | io, temperature?, k?}
POST /preview     {code, env}
POST /feedback    {result_id, code, query?}
GET  /bank/context, /bank/rules, /health

Every /synthesize response carries a result_id; /feedback uses it to
attribute the user's correction to the exact candidate list.  Only
/feedback mutates state, guarded by a non-blocking writer lock (a busy
lock yields 409).
"""

from __future__ import annotations

import json
import threading
from dataclasses import replace as dc_replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from ..context import Tfidf
from ..lang import parse
from ..lang.lexer import ParseError
from ..modelio import TransportError
from ..pipeline import (
    Banks, FeedbackRejected, IOExample, PipelineConfig, SynthesisResult,
    TaskSpec, record_feedback, synthesize,
)
from ..repair import Candidate
from ..tables import (
    Env, EvalError, try_eval_program, value_from_json, value_to_json,
)
from .state import AppState


class ApiError(Exception):
    def __init__(self, status: int, message: str, detail: Optional[dict] = None):
        self.status = status
        self.message = message
        self.detail = detail or {}
        super().__init__(message)


def _parse_env(obj) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ApiError(400, "env must be an object of name -> value")
    out = {}
    for name, val in obj.items():
        try:
            out[name] = value_from_json(val)
        except (ValueError, KeyError, TypeError) as err:
            raise ApiError(400, f"bad value for env.{name}: {err}") from err
    return out


def _candidate_json(c: Candidate) -> dict:
    return {
        "code": c.source,
        "origin": c.origin,
        "status": c.status,
        "rank": c.rank,
        "rule_id": c.rule_id,
        "error_kind": c.error_kind,
    }


def _result_json(result_id: str, result: SynthesisResult) -> dict:
    return {
        "result_id": result_id,
        "query": result.query,
        "stage_reached": result.stage_reached,
        "unchecked": result.unchecked,
        "transport_error": result.transport_error,
        "timings": result.timings,
        "candidates": [_candidate_json(c) for c in result.candidates],
    }


def handle_synthesize(state: AppState, body: dict) -> dict:
    query = body.get("query")
    if not query or not isinstance(query, str):
        raise ApiError(400, "missing query")
    env = _parse_env(body.get("env"))
    output_name = body.get("output_name", "dfout")
    examples: list[IOExample] = []
    if body.get("io"):
        for i, ex in enumerate(body["io"]):
            try:
                inputs = {k: value_from_json(v) for k, v in ex.get("inputs", {}).items()}
                examples.append(IOExample(
                    inputs or dict(env),
                    ex.get("output", output_name),
                    value_from_json(ex["expected"]),
                ))
            except (KeyError, ValueError, TypeError) as err:
                raise ApiError(400, f"bad io[{i}]: {err}") from err
    elif "expected" in body:
        try:
            expected = value_from_json(body["expected"])
        except (ValueError, TypeError) as err:
            raise ApiError(400, f"bad expected value: {err}") from err
        examples.append(IOExample(dict(env), output_name, expected))
    spec = TaskSpec(queries=[(query, body.get("user", ""))], io_examples=examples)
    cfg = state.cfg
    if "temperature" in body or "k" in body:
        model = dc_replace(cfg.model, temperature=float(body.get("temperature", cfg.model.temperature)))
        strategy = Tfidf(int(body["k"])) if "k" in body else cfg.strategy
        cfg = dc_replace(cfg, model=model, strategy=strategy)
    try:
        result = synthesize(spec, state.banks, cfg, query=query)
    except TransportError as err:
        raise ApiError(502, str(err)) from err
    if result.transport_error:
        raise ApiError(502, result.transport_error)
    result_id = state.remember(spec, result)
    return _result_json(result_id, result)


def handle_preview(state: AppState, body: dict) -> dict:
    code = body.get("code")
    if not code or not isinstance(code, str):
        raise ApiError(400, "missing code")
    env = _parse_env(body.get("env"))
    try:
        program = parse(code)
    except ParseError as err:
        return {"error": {"kind": "parse_error", "message": err.message,
                          "line": err.line, "col": err.col}}
    result = try_eval_program(program, Env(env), state.cfg.step_limit)
    if isinstance(result, EvalError):
        return {"error": {"kind": result.kind, "message": str(result)}}
    last = program.stmts[-1]
    from ..lang import ast as A
    if isinstance(last, A.Assign) and isinstance(last.target, A.NameRef):
        value = result.bindings.get(last.target.id)
        name = last.target.id
    else:
        name = None
        value = None
        changed = {k: v for k, v in result.bindings.items() if env.get(k) is not v}
        if changed:
            name, value = sorted(changed.items())[-1]
    return {
        "value": value_to_json(value) if value is not None else None,
        "output_name": name,
    }


def handle_feedback(state: AppState, body: dict) -> dict:
    result_id = body.get("result_id")
    code = body.get("code")
    if not result_id or not code:
        raise ApiError(400, "feedback needs result_id and code")
    remembered = state.recall(result_id)
    if remembered is None:
        raise ApiError(404, f"unknown result_id {result_id!r}")
    spec, result = remembered
    query = body.get("query") or result.query
    if not state.write_lock.acquire(blocking=False):
        raise ApiError(409, "another bank write is in progress")
    try:
        outcome = record_feedback(spec, query, code, result, state.banks, state.cfg)
    except FeedbackRejected as err:
        raise ApiError(400, str(err), {"diff": err.diff}) from err
    except ValueError as err:
        raise ApiError(400, str(err)) from err
    finally:
        state.write_lock.release()
    return {
        "bank_added": outcome.bank_added,
        "pairs_harvested": outcome.pairs_harvested,
        "clusters_total": outcome.clusters_total,
        "bank_size": outcome.bank_size,
    }


def handle_bank_context(state: AppState) -> list:
    return state.banks.context.to_json()


def handle_bank_rules(state: AppState) -> list:
    return state.banks.rules.to_json()


def make_handler(state: AppState):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _send(self, status: int, payload) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()

        def do_GET(self):
            if self.path == "/health":
                self._send(200, {"status": "ok", "bank_size": len(state.banks.context),
                                 "rules": len(state.banks.rules)})
            elif self.path == "/bank/context":
                self._send(200, handle_bank_context(state))
            elif self.path == "/bank/rules":
                self._send(200, handle_bank_rules(state))
            else:
                self._send(404, {"error": "not found"})

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
                if not isinstance(body, dict):
                    raise ValueError("body must be a JSON object")
            except ValueError as err:
                self._send(400, {"error": f"bad JSON body: {err}"})
                return
            routes = {
                "/synthesize": handle_synthesize,
                "/preview": handle_preview,
                "/feedback": handle_feedback,
            }
            handler = routes.get(self.path)
            if handler is None:
                self._send(404, {"error": "not found"})
                return
            try:
                self._send(200, handler(state, body))
            except ApiError as err:
                self._send(err.status, {"error": err.message, **err.detail})
            except Exception as err:  # keep the server alive on bugs
                self._send(500, {"error": f"internal error: {err}"})

    return Handler


def make_server(state: AppState, port: int = 0, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), make_handler(state))


def serve(state: AppState, port: int, host: str = "127.0.0.1") -> None:
    """Run the HTTP API until interrupted."""
    server = make_server(state, port, host)
    try:
        server.serve_forever()
    finally:
        server.server_close()
