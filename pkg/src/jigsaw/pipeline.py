"""End-to-end synthesis orchestration.

A synthesize call runs: context selection -> prompt -> model completion
-> parse and dedupe -> I/O validation -> staged repair (variable names,
then learned rewrites, then argument enumeration) -> ranking.  Each
stage short-circuits as soon as some candidate passes every I/O example.
The feedback path updates the context bank (Algorithm-style gated
update) and harvests edit pairs for the rewrite-rule learner.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import context as ctx
from . import learn as learnmod
from .lang import parse, unparse
from .lang.lexer import ParseError
from .modelio import Completion, ModelConfig, TransportError, complete, render_prompt
from .repair import (
    Candidate, SearchBudget, apply_rules, candidate_receivers,
    enumerate_candidates, extract_call_chain, fix_variable_names,
    infer_argument_pool,
)
from .tables import (
    Env, EvalError, FrameValue, Value, eval_program, try_eval_program,
    value_to_json, values_equal,
)

STAGE_MODEL = "model"
STAGE_VARFIX = "varfix"
STAGE_SEMANTIC = "semantic_repair"

_ORIGIN_ORDER = {"model": 0, "varfix": 1, "rewrite": 2, "argfix": 3}
_STATUS_ORDER = {"pass_io": 0, "unchecked": 1, "fail_io": 2, "runtime_error": 3, "parse_error": 4}

ORIGIN_STAGE = {"model": 1, "varfix": 2, "rewrite": 3, "argfix": 3}


@dataclass
class IOExample:
    inputs: dict[str, Value]
    output_name: str
    expected: Value


@dataclass
class TaskSpec:
    """Multi-modal intent: natural-language queries plus I/O examples."""

    queries: list[tuple[str, str]]
    io_examples: list[IOExample]
    virtual_files: dict[str, FrameValue] = field(default_factory=dict)
    reference_solutions: Optional[list[str]] = None
    task_id: str = ""

    def __post_init__(self):
        if not self.queries:
            raise ValueError("a task needs at least one query")


@dataclass
class Banks:
    context: ctx.ContextBank
    rules: learnmod.RuleBank
    context_path: Optional[str] = None
    rules_path: Optional[str] = None

    def persist(self) -> None:
        if self.context_path:
            self.context.save(self.context_path)
        if self.rules_path:
            self.rules.save(self.rules_path)


@dataclass
class PipelineConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    strategy: ctx.SelectionStrategy = field(default_factory=lambda: ctx.Tfidf(4))
    max_programs: int = 20_000
    wall_clock: float = 5.0
    step_limit: int = 100_000
    float_tol: float = 1e-9
    eps_code: int = ctx.DEFAULT_EPS_CODE
    eps_bank: float = ctx.DEFAULT_EPS_BANK
    eps_pair: int = learnmod.DEFAULT_EPS_PAIR


@dataclass
class SynthesisResult:
    query: str
    candidates: list[Candidate]
    stage_reached: str
    timings: dict[str, float] = field(default_factory=dict)
    model_config: Optional[ModelConfig] = None
    transport_error: Optional[str] = None
    unchecked: bool = False

    def passing(self) -> list[Candidate]:
        return [c for c in self.candidates if c.status == "pass_io"]

    def solved_at_stage(self, stage: int) -> bool:
        """True when some passing candidate comes from stage <= `stage`
        (1=model, 2=+variable names, 3=+semantic repair)."""
        return any(ORIGIN_STAGE[c.origin] <= stage for c in self.passing())


def _example_env(example: IOExample, spec: TaskSpec) -> Env:
    return Env(dict(example.inputs), dict(spec.virtual_files))


def validate_candidate(c: Candidate, spec: TaskSpec, cfg: PipelineConfig) -> None:
    """Run the candidate on every I/O example and set its status."""
    if c.program is None:
        c.status = "parse_error"
        return
    if not spec.io_examples:
        c.status = "unchecked"
        return
    for example in spec.io_examples:
        env = _example_env(example, spec)
        result = try_eval_program(c.program, env, cfg.step_limit)
        if isinstance(result, EvalError):
            c.status = "runtime_error"
            c.error_kind = result.kind
            return
        got = result.bindings.get(example.output_name)
        if got is None and example.output_name not in result.bindings:
            c.status = "fail_io"
            return
        if not values_equal(got, example.expected, cfg.float_tol):
            c.status = "fail_io"
            return
    c.status = "pass_io"


def _rank_key(c: Candidate) -> tuple:
    return (
        _STATUS_ORDER.get(c.status, 5),
        _ORIGIN_ORDER.get(c.origin, 9),
        c.rank,
        c.source,
    )


def synthesize(
    spec: TaskSpec,
    banks: Banks,
    cfg: PipelineConfig,
    query: Optional[str] = None,
) -> SynthesisResult:
    """Run the full pipeline for one query of the task."""
    query = query if query is not None else spec.queries[0][0]
    timings: dict[str, float] = {}
    candidates: list[Candidate] = []
    by_source: dict[str, Candidate] = {}

    def admit(c: Candidate) -> Optional[Candidate]:
        if c.source in by_source:
            return None
        by_source[c.source] = c
        candidates.append(c)
        validate_candidate(c, spec, cfg)
        return c

    def done() -> bool:
        return any(c.status == "pass_io" for c in candidates)

    # stage 1: model
    t0 = time.monotonic()
    pairs = ctx.select_context(banks.context, query, cfg.strategy)
    prompt = render_prompt(pairs, query)
    try:
        completions = complete(cfg.model, prompt)
    except TransportError as err:
        return SynthesisResult(
            query=query, candidates=[], stage_reached=STAGE_MODEL,
            timings={"model": time.monotonic() - t0}, model_config=cfg.model,
            transport_error=str(err),
        )
    model_candidates: list[Candidate] = []
    for completion in completions:
        text = completion.text
        try:
            program = parse(text)
            c = Candidate(source=unparse(program), program=program,
                          origin="model", rank=completion.rank)
        except ParseError:
            c = Candidate(source=text, program=None, origin="model",
                          rank=completion.rank, status="parse_error")
        admitted = admit(c)
        if admitted is not None and admitted.program is not None:
            model_candidates.append(admitted)
    timings["model"] = time.monotonic() - t0
    if not spec.io_examples:
        for c in candidates:
            c.status = "unchecked"
        candidates.sort(key=_rank_key)
        return SynthesisResult(query, candidates, STAGE_MODEL, timings, cfg.model,
                               unchecked=True)
    if done():
        candidates.sort(key=_rank_key)
        return SynthesisResult(query, candidates, STAGE_MODEL, timings, cfg.model)

    # stage 2: variable-name repair
    t0 = time.monotonic()
    repair_env = _example_env(spec.io_examples[0], spec)
    for base in list(model_candidates):
        for fixed in fix_variable_names(base, repair_env, spec.io_examples[0].output_name):
            admit(fixed)
        if done():
            break
    timings["varfix"] = time.monotonic() - t0
    if done():
        candidates.sort(key=_rank_key)
        return SynthesisResult(query, candidates, STAGE_VARFIX, timings, cfg.model)

    # stage 3: semantic repair; rewrite rules first, they are near-free
    t0 = time.monotonic()
    rules = banks.rules.rules
    banks.rules.record_attempts([r.id for r in rules])
    for base in list(model_candidates):
        for fixed, rule_id in apply_rules(base.program, rules):
            admitted = admit(fixed)
            if admitted is not None and admitted.status == "pass_io":
                banks.rules.record_fire(rule_id)
        if done():
            break
    if not done():
        budget = SearchBudget(max_programs=cfg.max_programs, wall_clock=cfg.wall_clock)
        out_name = spec.io_examples[0].output_name
        for base in list(model_candidates):
            chain = extract_call_chain(base.program)
            pool = infer_argument_pool(query, base, repair_env)
            receivers = candidate_receivers(base, repair_env)
            for fixed in enumerate_candidates(chain, pool, receivers, budget,
                                              repair_env, out_name):
                fixed.rank = base.rank
                admit(fixed)
                if done():
                    break
            if done() or budget.exhausted:
                break
    timings["semantic_repair"] = time.monotonic() - t0
    candidates.sort(key=_rank_key)
    return SynthesisResult(query, candidates, STAGE_SEMANTIC, timings, cfg.model)


# ----------------------------------------------------------------------
# feedback


class FeedbackRejected(ValueError):
    """Raised when submitted feedback code does not pass the task's
    examples; carries the structured diff of the first failure."""

    def __init__(self, message: str, diff: Optional[dict] = None):
        super().__init__(message)
        self.diff = diff or {}


@dataclass
class FeedbackOutcome:
    bank_added: bool
    pairs_harvested: int
    clusters_total: int
    bank_size: int


def check_feedback_code(code: str, spec: TaskSpec, cfg: PipelineConfig):
    """Parse and validate feedback code against the spec; returns the
    parsed program or raises FeedbackRejected with the failing diff."""
    try:
        program = parse(code)
    except ParseError as err:
        raise FeedbackRejected(f"code does not parse: {err}") from err
    for i, example in enumerate(spec.io_examples):
        env = _example_env(example, spec)
        result = try_eval_program(program, env, cfg.step_limit)
        if isinstance(result, EvalError):
            raise FeedbackRejected(
                f"example {i}: evaluation failed ({result.kind})",
                {"example": i, "error": result.kind, "message": str(result)},
            )
        got = result.bindings.get(example.output_name)
        if not values_equal(got, example.expected, cfg.float_tol):
            raise FeedbackRejected(
                f"example {i}: output mismatch",
                {
                    "example": i,
                    "expected": value_to_json(example.expected),
                    "got": value_to_json(got) if got is not None else None,
                },
            )
    return program


def record_feedback(
    spec: TaskSpec,
    query: str,
    final_code: str,
    result: SynthesisResult,
    banks: Banks,
    cfg: Optional[PipelineConfig] = None,
) -> FeedbackOutcome:
    """Ingest a correct user solution: grow the context bank when the
    update rule admits it, harvest edit pairs from failing candidates,
    and persist both banks."""
    cfg = cfg or PipelineConfig()
    check_feedback_code(final_code, spec, cfg)
    outputs = [c.source for c in result.candidates]
    added = ctx.update_bank(
        banks.context, query, final_code, outputs,
        eps_code=cfg.eps_code, eps_bank=cfg.eps_bank,
    )
    model_candidates = [c for c in result.candidates if c.origin == "model"]
    pairs = learnmod.harvest_feedback([final_code], model_candidates, cfg.eps_pair)
    for pair in pairs:
        banks.rules.add_pair(pair)
    banks.persist()
    return FeedbackOutcome(
        bank_added=added,
        pairs_harvested=len(pairs),
        clusters_total=len(banks.rules),
        bank_size=len(banks.context),
    )
