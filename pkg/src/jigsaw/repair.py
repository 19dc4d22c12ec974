"""Post-processing repair stages: variable-name search, enumerative
argument repair seeded by the model's call chain, and application of
learned rewrite rules.

Variable repair retargets the final assignment to the expected output
name and tries injective mappings from the program's free names into the
environment's bindings.  Argument repair keeps the candidate's receiver
expression and method sequence fixed and re-synthesizes call arguments
from a pool inferred from the query text, the candidate itself and the
environment schema, breadth-first by argument complexity.
"""

from __future__ import annotations

import itertools
import re
import time
from dataclasses import dataclass, field
from difflib import SequenceMatcher
from typing import Iterator, Optional, Sequence

from .lang import ast as A
from .lang import free_names, parse, unparse, walk_expr, walk_program
from .modelio import rename_names
from .rules import RewriteRule, apply_rule
from .tables import Env, FrameValue, SeriesValue, kind_of
from .tables.catalog import BuiltinSig, lookup

DEFAULT_MAX_PROGRAMS = 20_000
DEFAULT_WALL_CLOCK = 5.0
MAX_NAME_MAPPINGS = 256
MAX_FREE_NAMES_EXHAUSTIVE = 6


@dataclass
class Candidate:
    """One candidate program at any stage of the pipeline."""

    source: str
    program: Optional[A.Program] = None
    origin: str = "model"  # model | varfix | argfix | rewrite
    rank: int = 0
    rule_id: Optional[str] = None
    status: str = "unchecked"  # parse_error | runtime_error | fail_io | pass_io | unchecked
    error_kind: Optional[str] = None
    parent: Optional[str] = None

    @classmethod
    def from_program(cls, program: A.Program, **kw) -> "Candidate":
        return cls(source=unparse(program), program=program, **kw)


@dataclass
class SearchBudget:
    max_programs: int = DEFAULT_MAX_PROGRAMS
    wall_clock: float = DEFAULT_WALL_CLOCK
    programs_emitted: int = 0
    exhausted: bool = False
    _deadline: float = field(default=0.0, repr=False)

    def __post_init__(self):
        if self.max_programs <= 0 or self.wall_clock <= 0:
            raise ValueError("budget must be positive")

    def start(self) -> None:
        self._deadline = time.monotonic() + self.wall_clock

    def spent(self) -> bool:
        if self.programs_emitted >= self.max_programs:
            self.exhausted = True
        elif self._deadline and time.monotonic() > self._deadline:
            self.exhausted = True
        return self.exhausted


@dataclass
class ArgPool:
    """Inferred argument space for the enumerative search."""

    strings: list[str] = field(default_factory=list)
    numbers: list[A.Cell] = field(default_factory=list)
    column_names: list[str] = field(default_factory=list)
    var_names: list[str] = field(default_factory=list)


# ----------------------------------------------------------------------
# variable-name repair


def _retarget(program: A.Program, out_name: str) -> A.Program:
    stmts = list(program.stmts)
    last = stmts[-1]
    if isinstance(last, A.Assign):
        if isinstance(last.target, A.NameRef) and last.target.id != out_name:
            stmts[-1] = A.Assign(A.NameRef(out_name), last.value)
    else:
        stmts[-1] = A.Assign(A.NameRef(out_name), last.value)
    return A.Program(tuple(stmts))


def _name_similarity(a: str, b: str) -> float:
    return SequenceMatcher(None, a, b).ratio()


def fix_variable_names(c: Candidate, env: Env, out_name: str) -> list[Candidate]:
    """Candidates with the output retargeted and free names remapped
    injectively into compatible environment bindings, best-first by name
    similarity, capped at 256 mappings."""
    if c.program is None:
        return []
    base = _retarget(c.program, out_name)
    results: list[Candidate] = []
    seen: set[str] = set()

    def emit(program: A.Program, parent: Candidate) -> None:
        text = unparse(program)
        if text in seen:
            return
        seen.add(text)
        results.append(Candidate(
            source=text, program=program, origin="varfix",
            rank=parent.rank, parent=parent.source,
        ))

    emit(base, c)
    names = sorted(free_names(base) - {"pd"})
    env_names = sorted(env.bindings)
    if not names or not env_names:
        return results

    def compatible(free: str, bound: str) -> bool:
        if free not in env.bindings:
            return True
        return kind_of(env.bindings[free]) == kind_of(env.bindings[bound])

    scored: list[tuple[float, dict[str, str]]] = []
    if len(names) <= MAX_FREE_NAMES_EXHAUSTIVE and len(env_names) >= len(names):
        for image in itertools.permutations(env_names, len(names)):
            mapping = dict(zip(names, image))
            if not all(compatible(f, t) for f, t in mapping.items()):
                continue
            score = sum(_name_similarity(f, t) for f, t in mapping.items())
            scored.append((-score, mapping))
        scored.sort(key=lambda t: (t[0], sorted(t[1].items())))
    else:
        # too many names to enumerate: greedy best target per name
        mapping = {}
        remaining = list(env_names)
        for f in names:
            remaining.sort(key=lambda t: -_name_similarity(f, t))
            if remaining:
                mapping[f] = remaining.pop(0)
        scored.append((0.0, mapping))

    for _, mapping in scored[:MAX_NAME_MAPPINGS]:
        emit(_retarget(rename_names(base, mapping), out_name), c)
    return results


# ----------------------------------------------------------------------
# call chains and argument pools


def extract_call_chain(p: A.Program) -> list[str]:
    """Called function/method names in left-to-right evaluation order;
    plain attribute accesses are not included."""
    chain: list[str] = []

    def visit(e: A.Expr) -> None:
        if isinstance(e, A.Call):
            callee = e.callee
            if isinstance(callee, A.Attr):
                visit(callee.base)
                for arg in e.args:
                    visit(arg)
                for _, v in e.kwargs:
                    visit(v)
                chain.append(callee.name)
                return
            if isinstance(callee, A.NameRef):
                for arg in e.args:
                    visit(arg)
                for _, v in e.kwargs:
                    visit(v)
                chain.append(callee.id)
                return
        for child in _children(e):
            visit(child)

    for stmt in p.stmts:
        if isinstance(stmt, A.Assign):
            visit(stmt.value)
        else:
            visit(stmt.value)
    return chain


def _children(e: A.Expr):
    from .lang import child_exprs

    return child_exprs(e)


_NUMBER_RE = re.compile(r"(?<![\w.])(\d+(?:\.\d+)?)(?![\w.])")
_QUOTED_RE = re.compile(r"'([^']*)'|\"([^\"]*)\"")


def infer_argument_pool(query: str, c: Candidate, env: Env) -> ArgPool:
    """Pool literals from the query and candidate, column names from the
    env frames and variable names from the env."""
    strings: list[str] = []
    numbers: list[A.Cell] = []

    def add_string(s: str) -> None:
        if s and s not in strings:
            strings.append(s)

    def add_number(v) -> None:
        if v not in numbers:
            numbers.append(v)

    for m in _QUOTED_RE.finditer(query):
        add_string(m.group(1) if m.group(1) is not None else m.group(2))
    stripped = _QUOTED_RE.sub(" ", query)
    for m in _NUMBER_RE.finditer(stripped):
        text = m.group(1)
        add_number(float(text) if "." in text else int(text))
    if c.program is not None:
        for node in walk_program(c.program):
            if isinstance(node, A.Literal):
                if isinstance(node.value, str):
                    add_string(node.value)
                elif isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
                    add_number(node.value)
    column_names: list[str] = []
    for value in env.bindings.values():
        if isinstance(value, FrameValue):
            for name in value.names:
                if name not in column_names:
                    column_names.append(name)
    return ArgPool(
        strings=strings,
        numbers=numbers,
        column_names=column_names,
        var_names=sorted(env.bindings),
    )


# ----------------------------------------------------------------------
# enumerative argument repair


def candidate_receivers(c: Candidate, env: Env) -> list[tuple[A.Expr, str]]:
    """Receivers to try: the model candidate's own receiver expression
    first, then env frames and series as fallbacks."""
    out: list[tuple[A.Expr, str]] = []
    seen: set[str] = set()

    def add(expr: A.Expr, kind: str) -> None:
        text = unparse(A.Program((A.ExprStmt(expr),)))
        if text not in seen:
            seen.add(text)
            out.append((expr, kind))

    if c.program is not None:
        recv = _receiver_of(c.program)
        if recv is not None:
            add(recv, _receiver_kind(recv, env))
    for name in sorted(env.bindings):
        value = env.bindings[name]
        if isinstance(value, FrameValue):
            add(A.NameRef(name), "frame")
        elif isinstance(value, SeriesValue):
            add(A.NameRef(name), "series")
    return out


def _receiver_of(p: A.Program) -> Optional[A.Expr]:
    """The expression the innermost call is invoked on."""
    stmt = p.stmts[-1]
    expr = stmt.value if isinstance(stmt, (A.Assign, A.ExprStmt)) else None
    innermost: Optional[A.Expr] = None
    for node in walk_expr(expr):
        if isinstance(node, A.Call) and isinstance(node.callee, A.Attr):
            innermost = node.callee.base
    return innermost


def _receiver_kind(recv: A.Expr, env: Env) -> str:
    # a .str accessor receiver keeps its own method namespace
    if isinstance(recv, A.Attr) and recv.name == "str":
        return "str"
    if isinstance(recv, A.NameRef) and recv.id in env.bindings:
        return kind_of(env.bindings[recv.id])
    if isinstance(recv, A.Subscript):
        return "series"
    if isinstance(recv, A.NameRef) and recv.id == "pd":
        return "top"
    return "frame"


def _lit(v) -> A.Expr:
    return A.Literal(v)


def _sorted_cells(values) -> list:
    return sorted(values, key=lambda v: (type(v).__name__, str(v)))


def _receiver_cell_values(recv: A.Expr, env: Env) -> dict[str, set]:
    """Column name -> set of cells, for priority ordering of literals."""
    frame = None
    if isinstance(recv, A.NameRef):
        value = env.bindings.get(recv.id)
        if isinstance(value, FrameValue):
            frame = value
    if frame is None:
        for value in env.bindings.values():
            if isinstance(value, FrameValue):
                frame = value
                break
    if frame is None:
        return {}
    return {name: set(v for v in values if v is not None) for name, values in frame.columns}


def _slot_options(slot, pool: ArgPool, cells: dict[str, set]) -> list[tuple[int, Optional[A.Expr]]]:
    """(cost, expr) options for one argument slot; None means omitted."""
    domain = slot.domain
    options: list[tuple[int, Optional[A.Expr]]] = []
    if not slot.required:
        options.append((0, None))
    if domain == "frame_var":
        options += [(1, A.NameRef(v)) for v in pool.var_names]
    elif domain == "column_list":
        cols = pool.column_names[:8]
        for r in (1, 2, 3):
            for combo in itertools.combinations(cols, r):
                options.append((r, A.ListLit(tuple(_lit(c) for c in combo))))
    elif domain == "column_or_list":
        cols = pool.column_names[:8]
        options += [(1, _lit(c)) for c in cols]
        for r in (1, 2, 3):
            for combo in itertools.permutations(cols, r):
                options.append((r + 1, A.ListLit(tuple(_lit(c) for c in combo))))
    elif domain == "keep_enum":
        options += [(1, _lit("first")), (1, _lit("last")), (1, _lit(False))]
    elif domain == "bool_enum":
        options += [(1, _lit(True)), (1, _lit(False))]
    elif domain == "bool_or_list":
        options += [(1, _lit(True)), (1, _lit(False))]
        for r in (1, 2):
            for combo in itertools.product((True, False), repeat=r):
                options.append((r + 1, A.ListLit(tuple(_lit(b) for b in combo))))
    elif domain == "axis_enum":
        options += [(1, _lit(0)), (1, _lit(1))]
    elif domain == "int_small":
        ints = [v for v in pool.numbers if isinstance(v, int)]
        options += [(1, _lit(v)) for v in _sorted_cells(set(ints))]
        options += [(2, _lit(v)) for v in (1, 2, 3, 5) if v not in ints]
    elif domain == "str_pool":
        ranked = _ranked_strings(pool, cells)
        options += [(1, _lit(s)) for s in ranked]
        options.append((2, _lit("")))
    elif domain == "path_str":
        options += [(1, _lit(s)) for s in pool.strings if "/" in s or s.endswith(".csv")]
    elif domain == "isin_values":
        literals = _sorted_cells(set(pool.strings) | set(pool.numbers))[:_MAX_POOL_LITERALS]
        for r in (1, 2, 3):
            for combo in itertools.combinations(literals, r):
                options.append((r, A.ListLit(tuple(_lit(v) for v in combo))))
        for v in pool.var_names:
            options.append((2, A.Attr(A.NameRef(v), "index")))
    elif domain == "labels_or_index":
        for v in pool.var_names:
            options.append((1, A.Attr(A.NameRef(v), "index")))
        literals = _sorted_cells(set(pool.numbers) | set(pool.strings))[:_MAX_POOL_LITERALS]
        options += [(1, _lit(v)) for v in literals]
        for r in (2, 3):
            for combo in itertools.combinations(literals, r):
                options.append((r, A.ListLit(tuple(_lit(v) for v in combo))))
    elif domain == "rename_dict":
        for old in pool.column_names:
            for new in pool.strings:
                if new != old:
                    options.append((2, A.DictLit(((_lit(old), _lit(new)),))))
    elif domain == "replace_args":
        options += _replace_options(pool, cells)
    else:
        raise ValueError(f"unknown slot domain {domain!r}")
    return options


def _ranked_strings(pool: ArgPool, cells: dict[str, set]) -> list[str]:
    """Strings that appear inside receiver cells come first."""
    present: set[str] = set()
    for values in cells.values():
        for v in values:
            if isinstance(v, str):
                present.add(v)
    in_cells, rest = [], []
    for s in pool.strings:
        hit = s in present or any(
            isinstance(v, str) and s in v for vs in cells.values() for v in vs
        )
        (in_cells if hit else rest).append(s)
    return in_cells + rest


_MAX_POOL_LITERALS = 12
_MAX_FLAT_PAIRS = 24
_MAX_SLOT_OPTIONS = 6000


def _replace_options(pool: ArgPool, cells: dict[str, set]) -> list[tuple[int, A.Expr]]:
    """Replace-map options: flat old->new dicts and one-level nested
    column->{old: new} dicts; olds present in the column's cells first."""
    literals = _sorted_cells(set(pool.strings) | set(pool.numbers))[:_MAX_POOL_LITERALS]
    options: list[tuple[int, A.Expr]] = []

    def same_kind(a, b) -> bool:
        return isinstance(a, str) == isinstance(b, str)

    flat_pairs = [
        (old, new) for old in literals for new in literals
        if old != new and same_kind(old, new)
    ][:_MAX_FLAT_PAIRS]
    for r in (1, 2, 3):
        for combo in itertools.combinations(flat_pairs, r):
            olds = [o for o, _ in combo]
            if len(set(map(str, olds))) != r:
                continue
            options.append((r + 1, A.DictLit(tuple((_lit(o), _lit(n)) for o, n in combo))))

    per_column: dict[str, list[tuple]] = {}
    for col in pool.column_names:
        present = cells.get(col, set())
        olds = [v for v in literals if v in present]
        pairs = [(o, n) for o in olds for n in literals if n != o and same_kind(o, n)]
        if pairs:
            per_column[col] = pairs
    cols = [c for c in pool.column_names if c in per_column]
    for r in (1, 2, 3):
        for col_combo in itertools.combinations(cols, r):
            for inner in itertools.product(*(per_column[c] for c in col_combo)):
                pairs = tuple(
                    (_lit(col), A.DictLit(((_lit(o), _lit(n)),)))
                    for col, (o, n) in zip(col_combo, inner)
                )
                options.append((2 * r, A.DictLit(pairs)))
    return options[:_MAX_SLOT_OPTIONS]


def _call_options(
    sig: BuiltinSig, pool: ArgPool, cells: dict[str, set]
) -> Iterator[tuple[int, tuple[A.Expr, ...], tuple[tuple[str, A.Expr], ...]]]:
    """All argument assignments for one method, cheapest total cost first."""
    per_slot = [_slot_options(slot, pool, cells) for slot in sig.slots]
    if not per_slot:
        yield (0, (), ())
        return
    combos = []
    for chosen in itertools.product(*per_slot):
        cost = sum(c for c, _ in chosen)
        args: list[A.Expr] = []
        kwargs: list[tuple[str, A.Expr]] = []
        for slot, (_, expr) in zip(sig.slots, chosen):
            if expr is None:
                continue
            if slot.name:
                kwargs.append((slot.name, expr))
            else:
                args.append(expr)
        combos.append((cost, tuple(args), tuple(kwargs)))
    combos.sort(key=lambda t: t[0])
    yield from combos


_RESULT_NAMESPACE = {"frame": "frame", "series": "series", "rolling": "rolling"}


def enumerate_candidates(
    chain: Sequence[str],
    pool: ArgPool,
    receivers: Sequence[tuple[A.Expr, str]],
    budget: SearchBudget,
    env: Optional[Env] = None,
    out_name: str = "out",
) -> Iterator[Candidate]:
    """Breadth-first stream of programs with the fixed call chain and
    enumerated arguments.  Deterministic; stops at the budget (the budget
    object's .exhausted flag is the exhaustion marker)."""
    budget.start()
    if not chain:
        return
    if any(not lookup(name) for name in chain):
        return
    env = env or Env()
    seen: set[str] = set()
    for recv_expr, recv_kind in receivers:
        cells = _receiver_cell_values(recv_expr, env)
        for program in _enumerate_chain(recv_expr, recv_kind, list(chain), pool, cells, out_name, budget):
            text = unparse(program)
            if text in seen:
                continue
            seen.add(text)
            if budget.spent():
                return
            budget.programs_emitted += 1
            yield Candidate(source=text, program=program, origin="argfix")


def _enumerate_chain(
    recv: A.Expr, recv_kind: str, chain: list[str], pool: ArgPool,
    cells: dict[str, set], out_name: str, budget: SearchBudget,
) -> Iterator[A.Program]:
    sigs_per_step: list[list[BuiltinSig]] = []
    kind = recv_kind
    for name in chain:
        sigs = list(lookup(name, kind))
        if not sigs and kind == "series":
            sigs = list(lookup(name, "str"))
        if not sigs:
            return
        sigs_per_step.append(sigs)
        kind = sigs[0].result if sigs[0].result in _RESULT_NAMESPACE else "series"

    def build(step: int, expr: A.Expr) -> Iterator[A.Expr]:
        if step == len(chain):
            yield expr
            return
        for sig in sigs_per_step[step]:
            callee_base = expr
            already_str = isinstance(expr, A.Attr) and expr.name == "str"
            if sig.receiver == "str" and not already_str:
                callee_base = A.Attr(expr, "str")
            for _, args, kwargs in _call_options(sig, pool, cells):
                if budget.spent():
                    return
                call = A.Call(A.Attr(callee_base, sig.name), args, kwargs)
                yield from build(step + 1, call)

    for final in build(0, recv):
        yield A.Program((A.Assign(A.NameRef(out_name), final),))


# ----------------------------------------------------------------------
# rewrite-rule repair


def apply_rules(p: A.Program, rules: Sequence[RewriteRule]) -> list[tuple[Candidate, str]]:
    """Apply every structurally matching rule at each match site; one
    candidate per site, duplicates removed."""
    out: list[tuple[Candidate, str]] = []
    seen: set[str] = set()
    for rule in rules:
        for program in apply_rule(p, rule):
            text = unparse(program)
            if text in seen:
                continue
            seen.add(text)
            out.append((
                Candidate(source=text, program=program, origin="rewrite",
                          rule_id=rule.id, parent=unparse(p)),
                rule.id,
            ))
    return out
