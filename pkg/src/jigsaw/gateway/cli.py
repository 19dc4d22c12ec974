"""Command-line interface.

    jigsaw synth -q "..." --env df=table.json --out dfout [--io expected.json]
    jigsaw eval --dataset tasks.json [--runs N --temperatures 0,0.2 --seed S]
    jigsaw feedback --dataset tasks.json --task ID --code fix.py
    jigsaw bank show|add
    jigsaw rules show|prune
    jigsaw serve --port 8080

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace as dc_replace

from ..context import NoContext, Tfidf, update_bank
from ..harness import evaluate, load_dataset
from ..modelio import ModelConfig
from ..pipeline import (
    Banks, FeedbackRejected, IOExample, PipelineConfig, TaskSpec,
    record_feedback, synthesize,
)
from ..tables import value_from_json, value_to_json
from .state import AppState, data_dir, load_banks


class DomainError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as err:
        raise DomainError(f"cannot read {path}: {err}") from err


def _model_from_args(args) -> ModelConfig:
    if args.model == "mock":
        script = _read_json(args.script) if args.script else {}
        return ModelConfig(kind="mock", script=script, temperature=args.temperature,
                           n_completions=args.n, seed=args.seed)
    return ModelConfig(kind="http", endpoint=args.endpoint,
                       temperature=args.temperature, n_completions=args.n,
                       timeout=args.timeout)


def _pipeline_cfg(args) -> PipelineConfig:
    strategy = NoContext() if args.k == 0 else Tfidf(args.k)
    return PipelineConfig(
        model=_model_from_args(args),
        strategy=strategy,
        max_programs=args.max_programs,
        wall_clock=args.wall_clock,
    )


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("mock", "http"), default="mock")
    p.add_argument("--script", help="mock script JSON (query -> completions)")
    p.add_argument("--endpoint", help="http completion endpoint (or JIGSAW_MODEL_URL)")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--n", type=int, default=1, help="completions per query")
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=4, help="context pairs (0 = no context)")
    p.add_argument("--max-programs", type=int, default=20000, dest="max_programs")
    p.add_argument("--wall-clock", type=float, default=5.0, dest="wall_clock")
    p.add_argument("--data-dir", default=None, help=f"bank directory (or JIGSAW_DATA_DIR)")


def _banks_from_args(args) -> Banks:
    base = args.data_dir or data_dir()
    os.makedirs(base, exist_ok=True)
    return load_banks(base)


def cmd_synth(args) -> int:
    env = {}
    for item in args.env or []:
        if "=" not in item:
            raise DomainError(f"--env expects name=path.json, got {item!r}")
        name, path = item.split("=", 1)
        env[name] = value_from_json(_read_json(path))
    examples = []
    if args.io:
        expected = value_from_json(_read_json(args.io))
        examples.append(IOExample(dict(env), args.out, expected))
    spec = TaskSpec(queries=[(args.query, "cli")], io_examples=examples)
    banks = _banks_from_args(args)
    result = synthesize(spec, banks, _pipeline_cfg(args), query=args.query)
    if result.transport_error:
        raise DomainError(f"model transport failed: {result.transport_error}")
    print(f"stage reached: {result.stage_reached}"
          + ("  (unchecked: no I/O example)" if result.unchecked else ""))
    for i, c in enumerate(result.candidates[: args.top]):
        marker = "PASS" if c.status == "pass_io" else c.status
        print(f"[{i}] {marker:14} {c.origin:7} {c.source}")
    return 0


def cmd_eval(args) -> int:
    ds = load_dataset(args.dataset)
    banks = _banks_from_args(args)
    temperatures = tuple(float(t) for t in args.temperatures.split(","))
    report = evaluate(ds, banks, _pipeline_cfg(args), runs=args.runs,
                      temperatures=temperatures, strict=not args.lenient,
                      seed=args.seed)
    print(report.format_table())
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(report.to_json(), fh, indent=1)
        print(f"report written to {args.json_out}")
    return 0


def cmd_feedback(args) -> int:
    ds = load_dataset(args.dataset)
    if args.task not in ds.tasks:
        raise DomainError(f"no task {args.task!r} in {args.dataset}")
    spec = ds.tasks[args.task]
    try:
        with open(args.code) as fh:
            code = fh.read().strip()
    except OSError as err:
        raise DomainError(str(err)) from err
    banks = _banks_from_args(args)
    cfg = _pipeline_cfg(args)
    query = args.query or spec.queries[0][0]
    result = synthesize(spec, banks, cfg, query=query)
    try:
        outcome = record_feedback(spec, query, code, result, banks, cfg)
    except (FeedbackRejected, ValueError) as err:
        raise DomainError(f"feedback rejected: {err}") from err
    print(f"bank added: {outcome.bank_added}; bank size: {outcome.bank_size}; "
          f"pairs harvested: {outcome.pairs_harvested}; rule clusters: {outcome.clusters_total}")
    return 0


def cmd_bank(args) -> int:
    banks = _banks_from_args(args)
    if args.action == "show":
        print(json.dumps(banks.context.to_json(), indent=1))
        return 0
    if not args.query or not args.code:
        raise DomainError("bank add needs --query and --code-text")
    added = update_bank(banks.context, args.query, args.code,
                        outputs=[args.code])
    banks.persist()
    print("added" if added else "unchanged (similar query exists or gate failed)")
    return 0


def cmd_rules(args) -> int:
    banks = _banks_from_args(args)
    if args.action == "show":
        print(json.dumps(banks.rules.to_json(), indent=1))
        return 0
    removed = banks.rules.prune(args.min_attempts, args.min_fires)
    banks.persist()
    print(f"pruned {removed} rules; {len(banks.rules)} remain")
    return 0


def cmd_serve(args) -> int:
    from .server import make_server

    banks = _banks_from_args(args)
    state = AppState(banks=banks, cfg=_pipeline_cfg(args))
    server = make_server(state, args.port, args.host)
    host, port = server.server_address
    print(f"listening on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jigsaw", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize code for a query")
    p.add_argument("-q", "--query", required=True)
    p.add_argument("--env", action="append", help="name=table.json (repeatable)")
    p.add_argument("--out", default="dfout", help="output variable name")
    p.add_argument("--io", help="expected output value JSON")
    p.add_argument("--top", type=int, default=10, help="candidates to print")
    _add_model_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="run a dataset evaluation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--temperatures", default="0,0.2,0.4,0.6")
    p.add_argument("--lenient", action="store_true",
                   help="count I/O passes without a reference match as solved")
    p.add_argument("--json-out", dest="json_out")
    _add_model_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("feedback", help="submit a correct solution for a task")
    p.add_argument("--dataset", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--code", required=True, help="file with the correct code")
    p.add_argument("--query", help="which query the fix answers (default: first)")
    _add_model_args(p)
    p.set_defaults(func=cmd_feedback)

    p = sub.add_parser("bank", help="inspect or extend the context bank")
    p.add_argument("action", choices=("show", "add"))
    p.add_argument("--query")
    p.add_argument("--code-text", dest="code")
    _add_model_args(p)
    p.set_defaults(func=cmd_bank)

    p = sub.add_parser("rules", help="inspect or prune the rewrite rules")
    p.add_argument("action", choices=("show", "prune"))
    p.add_argument("--min-attempts", type=int, default=50, dest="min_attempts")
    p.add_argument("--min-fires", type=int, default=1, dest="min_fires")
    _add_model_args(p)
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    _add_model_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else 2
    try:
        return args.func(args)
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli())
