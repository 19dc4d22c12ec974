"""Black-box model protocol: prompt rendering, a generic HTTP completion
client, a deterministic scripted mock, and a corruption injector that
reproduces the three recurring failure classes (variable referencing,
argument mistakes, small semantic slips) for experiments.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import requests

from .lang import ast as A
from .lang import parse, unparse
from .lang.lexer import ParseError

ENV_MODEL_URL = "JIGSAW_MODEL_URL"
ENV_MODEL_KEY = "JIGSAW_MODEL_KEY"

PROMPT_PREAMBLE = "import pandas as pd"
QUERY_PREFIX = "# Q: "

MAX_CONTEXT_PAIRS = 16


@dataclass(frozen=True)
class PromptPair:
    question: str
    answer: str

    def __post_init__(self):
        if not self.question or not self.answer:
            raise ValueError("prompt pairs need non-empty question and answer")


@dataclass(frozen=True)
class Completion:
    text: str
    finish_reason: str = "stop"
    rank: int = 0


class TransportError(Exception):
    KINDS = ("network", "auth", "malformed_response", "timeout")

    def __init__(self, kind: str, message: str):
        assert kind in self.KINDS
        self.kind = kind
        super().__init__(f"{kind}: {message}")


@dataclass
class ModelConfig:
    kind: str = "mock"  # mock | http
    endpoint: Optional[str] = None
    auth_token: Optional[str] = None
    temperature: float = 0.0
    n_completions: int = 1
    max_tokens: int = 256
    timeout: float = 10.0
    seed: int = 0
    # mock-only: query -> completions, plus optional corruption of the script
    script: dict = field(default_factory=dict)
    corruption: Optional[str] = None  # var_rename | arg_mutation | semantic

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError("temperature must be in [0, 1]")
        if self.n_completions < 1:
            raise ValueError("n_completions must be >= 1")


def render_prompt(pairs: Sequence[PromptPair], query: str) -> str:
    """Deterministic prompt layout: preamble, `# Q:`-prefixed question
    blocks with their answers, then the current query."""
    if len(pairs) > MAX_CONTEXT_PAIRS:
        raise ValueError(f"at most {MAX_CONTEXT_PAIRS} context pairs")
    lines = [PROMPT_PREAMBLE, ""]
    for pair in pairs:
        lines.append(QUERY_PREFIX + pair.question)
        lines.append(pair.answer)
        lines.append("")
    lines.append(QUERY_PREFIX + query)
    return "\n".join(lines) + "\n"


def final_query_of(prompt: str) -> str:
    """Recover the query from the last `# Q:` line of a rendered prompt."""
    for line in reversed(prompt.splitlines()):
        if line.startswith(QUERY_PREFIX):
            return line[len(QUERY_PREFIX):]
    return ""


# ----------------------------------------------------------------------
# completion clients

def _mock_variants(entry) -> tuple[list[str], Optional[str], list[str]]:
    """Script entries are either a list of texts or an object with
    completions / requires_context / fallback fields."""
    if isinstance(entry, list):
        return list(entry), None, []
    if isinstance(entry, str):
        return [entry], None, []
    if isinstance(entry, dict):
        return (
            list(entry.get("completions", [])),
            entry.get("requires_context"),
            list(entry.get("fallback", [])),
        )
    return [], None, []


def _mock_complete(cfg: ModelConfig, prompt: str) -> list[Completion]:
    query = final_query_of(prompt)
    variants, requires, fallback = _mock_variants(cfg.script.get(query))
    if requires is not None and requires not in prompt:
        variants = fallback
    if not variants:
        return []
    if cfg.corruption is not None:
        variants = [_corrupt_text(v, cfg.corruption, cfg.seed) for v in variants]
    # temperature widens the sampled prefix of scripted variants
    pool_size = 1 + round(cfg.temperature * (len(variants) - 1))
    pool = variants[:pool_size]
    if cfg.temperature == 0.0 or len(pool) == 1:
        chosen = [pool[0]] * cfg.n_completions
    else:
        rng = random.Random(f"{cfg.seed}:{query}")
        chosen = [pool[rng.randrange(len(pool))] for _ in range(cfg.n_completions)]
    return [Completion(text, "stop", i) for i, text in enumerate(chosen)]


def _http_complete(cfg: ModelConfig, prompt: str) -> list[Completion]:
    endpoint = cfg.endpoint or os.environ.get(ENV_MODEL_URL)
    if not endpoint:
        raise TransportError("network", f"no endpoint configured ({ENV_MODEL_URL})")
    token = cfg.auth_token or os.environ.get(ENV_MODEL_KEY)
    headers = {"Content-Type": "application/json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    body = {
        "prompt": prompt,
        "temperature": cfg.temperature,
        "n": cfg.n_completions,
        "max_tokens": cfg.max_tokens,
    }
    try:
        resp = requests.post(endpoint, json=body, headers=headers, timeout=cfg.timeout)
    except requests.Timeout as err:
        raise TransportError("timeout", str(err)) from err
    except requests.RequestException as err:
        raise TransportError("network", str(err)) from err
    if resp.status_code in (401, 403):
        raise TransportError("auth", f"HTTP {resp.status_code}")
    if resp.status_code != 200:
        raise TransportError("network", f"HTTP {resp.status_code}")
    try:
        payload = resp.json()
        choices = payload["choices"]
        out = []
        for i, choice in enumerate(choices[: cfg.n_completions]):
            text = choice["text"]
            if not isinstance(text, str):
                raise TypeError("choice text is not a string")
            # live models continue past the answer; keep text up to the
            # next question marker
            text = text.split("\n" + QUERY_PREFIX)[0].strip("\n")
            out.append(Completion(text, choice.get("finish_reason", "stop"), i))
        return out
    except (KeyError, TypeError, ValueError) as err:
        raise TransportError("malformed_response", str(err)) from err


def complete(cfg: ModelConfig, prompt: str) -> list[Completion]:
    """Query the configured model; mock at temperature 0 is deterministic."""
    if cfg.kind == "mock":
        return _mock_complete(cfg, prompt)
    if cfg.kind == "http":
        return _http_complete(cfg, prompt)
    raise ValueError(f"unknown model kind {cfg.kind!r}")


# ----------------------------------------------------------------------
# corruption injector

ERROR_CLASSES = ("var_rename", "arg_mutation", "semantic")

_FRESH_NAMES = ("df", "df1", "df2", "data", "dfin", "dfout", "frame", "tbl", "d1", "d2")


def _corrupt_text(text: str, error_class: str, seed: int) -> str:
    try:
        program = parse(text)
    except ParseError:
        return text
    corrupted, changed = corrupt(program, error_class, seed)
    return unparse(corrupted) if changed else text


def corrupt(p: A.Program, error_class: str, seed: int) -> tuple[A.Program, bool]:
    """Inject one error of the given class; returns (program, changed).

    Deterministic in seed.  When no applicable edit site exists the
    program comes back unchanged with changed=False.
    """
    if error_class not in ERROR_CLASSES:
        raise ValueError(f"unknown error class {error_class!r}")
    rng = random.Random(f"corrupt:{error_class}:{seed}")
    if error_class == "var_rename":
        return _corrupt_var_rename(p, rng)
    if error_class == "arg_mutation":
        return _corrupt_arg_mutation(p, rng)
    return _corrupt_semantic(p, rng)


def _rebuild(e: A.Expr, visit) -> A.Expr:
    """Bottom-up structural map over an expression."""
    e = _map_children(e, lambda c: _rebuild(c, visit))
    return visit(e)


def _map_children(e: A.Expr, f) -> A.Expr:
    if isinstance(e, A.Attr):
        return A.Attr(f(e.base), e.name)
    if isinstance(e, A.Subscript):
        return A.Subscript(f(e.base), f(e.key))
    if isinstance(e, A.Call):
        return A.Call(
            f(e.callee),
            tuple(f(a) for a in e.args),
            tuple((k, f(v)) for k, v in e.kwargs),
        )
    if isinstance(e, A.Unary):
        return A.Unary(e.op, f(e.operand))
    if isinstance(e, A.Binary):
        return A.Binary(e.op, f(e.left), f(e.right))
    if isinstance(e, A.CompareChain):
        return A.CompareChain(tuple(f(x) for x in e.operands), e.ops)
    if isinstance(e, A.ListLit):
        return A.ListLit(tuple(f(x) for x in e.items))
    if isinstance(e, A.DictLit):
        return A.DictLit(tuple((f(k), f(v)) for k, v in e.pairs))
    if isinstance(e, A.TupleLit):
        return A.TupleLit(tuple(f(x) for x in e.items))
    if isinstance(e, A.Slice):
        lo = f(e.lower) if e.lower is not None else None
        up = f(e.upper) if e.upper is not None else None
        return A.Slice(lo, up)
    return e


def _map_program(p: A.Program, f) -> A.Program:
    stmts = []
    for stmt in p.stmts:
        if isinstance(stmt, A.Assign):
            stmts.append(A.Assign(f(stmt.target), f(stmt.value)))
        else:
            stmts.append(A.ExprStmt(f(stmt.value)))
    return A.Program(tuple(stmts))


def rename_names(p: A.Program, mapping: dict[str, str]) -> A.Program:
    def visit(e: A.Expr) -> A.Expr:
        if isinstance(e, A.NameRef) and e.id in mapping:
            return A.NameRef(mapping[e.id])
        return e

    return _map_program(p, lambda e: _rebuild(e, visit))


def _corrupt_var_rename(p: A.Program, rng: random.Random) -> tuple[A.Program, bool]:
    names = sorted(free_names_for_corrupt(p))
    if not names:
        return p, False
    used = {n.id for n in _all_name_refs(p)}
    pool = [n for n in _FRESH_NAMES if n not in used]
    rng.shuffle(pool)
    mapping = {}
    for name in names:
        if not pool:
            break
        mapping[name] = pool.pop()
    if not mapping:
        return p, False
    return rename_names(p, mapping), True


def free_names_for_corrupt(p: A.Program) -> set[str]:
    from .lang import free_names

    return {n for n in free_names(p) if n != "pd"}


def _all_name_refs(p: A.Program):
    from .lang import walk_program

    return [n for n in walk_program(p) if isinstance(n, A.NameRef)]


def _wrong_literal(value, rng: random.Random):
    if isinstance(value, bool):
        return not value
    if isinstance(value, int):
        return value + rng.choice((3, 7, 11))
    if isinstance(value, float):
        return value + rng.choice((0.5, 2.0))
    if isinstance(value, str):
        return value[:-1] if len(value) > 1 else value + "x"
    return value


def _corrupt_arg_mutation(p: A.Program, rng: random.Random) -> tuple[A.Program, bool]:
    from .lang import walk_program

    calls = [e for e in walk_program(p) if isinstance(e, A.Call) and (e.args or e.kwargs)]
    if not calls:
        return p, False
    sites: list[tuple] = []
    for call in calls:
        for k, _ in call.kwargs:
            sites.append(("drop_kwarg", call, k))
        for i, arg in enumerate(call.args):
            if isinstance(arg, A.Literal) and arg.value is not None:
                sites.append(("swap_literal_arg", call, i))
        for k, v in call.kwargs:
            if isinstance(v, A.Literal) and v.value is not None:
                sites.append(("swap_literal_kwarg", call, k))
    if not sites:
        return p, False
    action, call, which = sites[rng.randrange(len(sites))]

    def visit(e: A.Expr) -> A.Expr:
        if e != call:
            return e
        if action == "drop_kwarg":
            return A.Call(e.callee, e.args, tuple((k, v) for k, v in e.kwargs if k != which))
        if action == "swap_literal_arg":
            args = list(e.args)
            lit = args[which]
            args[which] = A.Literal(_wrong_literal(lit.value, rng))
            return A.Call(e.callee, tuple(args), e.kwargs)
        kwargs = []
        for k, v in e.kwargs:
            if k == which and isinstance(v, A.Literal):
                v = A.Literal(_wrong_literal(v.value, rng))
            kwargs.append((k, v))
        return A.Call(e.callee, e.args, tuple(kwargs))

    return _map_program(p, lambda e: _rebuild(e, visit)), True


def _chain_from_parens(e: A.Binary) -> A.Expr | None:
    """Reverse a disambiguating parenthesization: rebuild the tree the
    ungrouped source text would parse to."""
    left, right = e.left, e.right
    if isinstance(left, A.CompareChain) and len(left.ops) == 1 and \
            isinstance(right, A.CompareChain) and len(right.ops) == 1:
        # (a<b) | (c>d)  ->  a < b|c > d
        a, b = left.operands
        c, d = right.operands
        return A.CompareChain((a, A.Binary(e.op, b, c), d), (left.ops[0], right.ops[0]))
    if e.op == A.AND and isinstance(left, A.Binary) and left.op == A.OR and \
            isinstance(right, A.CompareChain):
        # ((A)|(B)) & (C)  ->  (A) | (B)&(C)
        return A.Binary(A.OR, left.left, A.Binary(A.AND, left.right, right))
    return None


def _corrupt_semantic(p: A.Program, rng: random.Random) -> tuple[A.Program, bool]:
    from .lang import walk_program

    sites: list[tuple] = []
    for e in walk_program(p):
        if isinstance(e, A.Unary) and e.op == A.BITNOT:
            sites.append(("drop_bitnot", e))
        if isinstance(e, A.Binary) and _chain_from_parens(e) is not None:
            sites.append(("strip_parens", e))
        if isinstance(e, A.Attr) and e.name == "loc":
            sites.append(("loc_to_iloc", e))
            sites.append(("loc_to_ix", e))
        if isinstance(e, A.Call) and isinstance(e.callee, A.Attr) and \
                e.callee.name == "sum" and not e.args and not e.kwargs:
            sites.append(("drop_sum", e))
        if isinstance(e, A.Call) and e.args and isinstance(e.args[0], A.Attr) and \
                e.args[0].name == "index":
            sites.append(("strip_index_arg", e))
    if not sites:
        return p, False
    action, node = sites[rng.randrange(len(sites))]

    def visit(e: A.Expr) -> A.Expr:
        if e != node:
            return e
        if action == "drop_bitnot":
            return e.operand
        if action == "strip_parens":
            replaced = _chain_from_parens(e)
            return replaced if replaced is not None else e
        if action == "loc_to_iloc":
            return A.Attr(e.base, "iloc")
        if action == "loc_to_ix":
            return A.Attr(e.base, "ix")
        if action == "drop_sum":
            return e.callee.base
        if action == "strip_index_arg":
            args = (e.args[0].base,) + e.args[1:]
            return A.Call(e.callee, args, e.kwargs)
        return e

    corrupted = _map_program(p, lambda e: _rebuild(e, visit))
    return corrupted, corrupted != p
