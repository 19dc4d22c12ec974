"""AST node types for the table-expression language.

The language is a small Python-expression-shaped subset: assignments and
bare expressions over names, literals, attribute access, subscripts,
calls, bitwise/arithmetic operators and chained comparisons.  Nodes are
immutable; all sequence fields are tuples so structural equality works
out of the box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

Cell = Union[int, float, str, bool, None]

# Unary ops
BITNOT = "bitnot"
NEG = "neg"

# Binary ops (or_/and_ denote the bitwise | and &)
OR = "or_"
AND = "and_"
ADD = "add"
SUB = "sub"
MUL = "mul"
DIV = "div"
MOD = "mod"

# Comparison ops
CMP_OPS = ("lt", "le", "gt", "ge", "eq", "ne")

BINARY_SYMBOLS = {OR: "|", AND: "&", ADD: "+", SUB: "-", MUL: "*", DIV: "/", MOD: "%"}
CMP_SYMBOLS = {"lt": "<", "le": "<=", "gt": ">", "ge": ">=", "eq": "==", "ne": "!="}


@dataclass(frozen=True)
class NameRef:
    id: str


@dataclass(frozen=True, eq=False)
class Literal:
    value: Cell

    # 1 == 1.0 and True == 1 in Python; literal equality must be type-exact.
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Literal):
            return NotImplemented
        return type(self.value) is type(other.value) and self.value == other.value

    def __hash__(self) -> int:
        return hash((type(self.value).__name__, self.value))


@dataclass(frozen=True)
class Attr:
    base: "Expr"
    name: str


@dataclass(frozen=True)
class Subscript:
    base: "Expr"
    key: "Expr"


@dataclass(frozen=True)
class Call:
    callee: "Expr"
    args: tuple["Expr", ...] = ()
    kwargs: tuple[tuple[str, "Expr"], ...] = ()


@dataclass(frozen=True)
class Unary:
    op: str  # bitnot | neg
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # or_ | and_ | add | sub | mul | div | mod
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class CompareChain:
    """Python-style chained comparison: n operands, n-1 ops."""

    operands: tuple["Expr", ...]
    ops: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.operands) < 2 or len(self.ops) != len(self.operands) - 1:
            raise ValueError("CompareChain needs n>=2 operands and n-1 ops")


@dataclass(frozen=True)
class ListLit:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class DictLit:
    pairs: tuple[tuple["Expr", "Expr"], ...]  # keys restricted to Literal|NameRef


@dataclass(frozen=True)
class TupleLit:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Slice:
    """Subscript slice without a step, e.g. the bare ':' in df.loc[:, 'c']."""

    lower: Optional["Expr"] = None
    upper: Optional["Expr"] = None


Expr = Union[
    NameRef, Literal, Attr, Subscript, Call, Unary, Binary,
    CompareChain, ListLit, DictLit, TupleLit, Slice,
]


@dataclass(frozen=True)
class Assign:
    target: Expr  # NameRef or Subscript of a NameRef / Attr chain
    value: Expr


@dataclass(frozen=True)
class ExprStmt:
    value: Expr


Stmt = Union[Assign, ExprStmt]


@dataclass(frozen=True)
class Program:
    stmts: tuple[Stmt, ...]


def is_lvalue(e: Expr) -> bool:
    """True for NameRef or Subscript whose base is a NameRef/Attr chain."""
    if isinstance(e, NameRef):
        return True
    if isinstance(e, Subscript):
        base = e.base
        while isinstance(base, Attr):
            base = base.base
        return isinstance(base, NameRef)
    return False


def child_exprs(e: Expr) -> Iterator[Expr]:
    if isinstance(e, Attr):
        yield e.base
    elif isinstance(e, Subscript):
        yield e.base
        yield e.key
    elif isinstance(e, Call):
        yield e.callee
        yield from e.args
        for _, v in e.kwargs:
            yield v
    elif isinstance(e, Unary):
        yield e.operand
    elif isinstance(e, Binary):
        yield e.left
        yield e.right
    elif isinstance(e, CompareChain):
        yield from e.operands
    elif isinstance(e, ListLit):
        yield from e.items
    elif isinstance(e, DictLit):
        for k, v in e.pairs:
            yield k
            yield v
    elif isinstance(e, TupleLit):
        yield from e.items
    elif isinstance(e, Slice):
        if e.lower is not None:
            yield e.lower
        if e.upper is not None:
            yield e.upper


def walk_expr(e: Expr) -> Iterator[Expr]:
    """Pre-order walk over an expression tree."""
    yield e
    for c in child_exprs(e):
        yield from walk_expr(c)


def walk_program(p: Program) -> Iterator[Expr]:
    for stmt in p.stmts:
        if isinstance(stmt, Assign):
            yield from walk_expr(stmt.target)
            yield from walk_expr(stmt.value)
        else:
            yield from walk_expr(stmt.value)


def _expr_reads(e: Expr) -> Iterator[str]:
    for node in walk_expr(e):
        if isinstance(node, NameRef):
            yield node.id


def free_names(p: Program) -> set[str]:
    """Names read before being assigned within the program.

    Assignment targets are excluded unless read first; a subscript target
    (df['c'] = ...) reads its base name.
    """
    assigned: set[str] = set()
    free: set[str] = set()
    for stmt in p.stmts:
        if isinstance(stmt, Assign):
            for name in _expr_reads(stmt.value):
                if name not in assigned:
                    free.add(name)
            if isinstance(stmt.target, NameRef):
                assigned.add(stmt.target.id)
            else:
                # mutating an existing value: the whole target is a read
                for name in _expr_reads(stmt.target):
                    if name not in assigned:
                        free.add(name)
        else:
            for name in _expr_reads(stmt.value):
                if name not in assigned:
                    free.add(name)
    return free
