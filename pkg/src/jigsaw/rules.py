"""Rewrite-rule machinery: a uniform tagged-tree view of programs,
guard patterns with typed holes, template instantiation and rule
application.

Guards and templates operate on a generic tree (GNode) rather than the
AST classes so that every position, including attribute names and
literal payloads, is addressable by the learner.  A hole in a guard
matches a subtree of the right kind; a repeated hole id requires the
matched subtrees to be structurally equal.  Templates mix concrete
nodes with references to guard holes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .lang import ast as A
from .lang import parse, unparse
from .lang.lexer import ParseError

EXPR_TAGS = frozenset({
    "name", "lit", "attr", "subscript", "call", "unary", "binary",
    "compare", "list", "dict", "tuple",
})

HOLE_KINDS = ("any_expr", "name", "literal")


@dataclass(frozen=True)
class GNode:
    tag: str
    value: object = None
    children: tuple = ()


@dataclass(frozen=True)
class Hole:
    id: str
    kind: str  # any_expr | name | literal


@dataclass(frozen=True)
class Ref:
    id: str


GTree = Union[GNode, Hole, Ref]


class MalformedTree(Exception):
    pass


# ----------------------------------------------------------------------
# AST <-> generic tree


def _lit_payload(value) -> tuple:
    if value is None:
        return ("none", None)
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, int):
        return ("int", value)
    if isinstance(value, float):
        return ("float", value)
    return ("str", value)


def expr_to_gtree(e: A.Expr) -> GNode:
    if isinstance(e, A.NameRef):
        return GNode("name", e.id)
    if isinstance(e, A.Literal):
        return GNode("lit", _lit_payload(e.value))
    if isinstance(e, A.Attr):
        return GNode("attr", None, (expr_to_gtree(e.base), GNode("member", e.name)))
    if isinstance(e, A.Subscript):
        return GNode("subscript", None, (expr_to_gtree(e.base), expr_to_gtree(e.key)))
    if isinstance(e, A.Call):
        args = GNode("args", None, tuple(expr_to_gtree(a) for a in e.args))
        kwargs = GNode(
            "kwargs", None,
            tuple(GNode("kw", k, (expr_to_gtree(v),)) for k, v in e.kwargs),
        )
        return GNode("call", None, (expr_to_gtree(e.callee), args, kwargs))
    if isinstance(e, A.Unary):
        return GNode("unary", e.op, (expr_to_gtree(e.operand),))
    if isinstance(e, A.Binary):
        return GNode("binary", e.op, (expr_to_gtree(e.left), expr_to_gtree(e.right)))
    if isinstance(e, A.CompareChain):
        return GNode("compare", tuple(e.ops), tuple(expr_to_gtree(x) for x in e.operands))
    if isinstance(e, A.ListLit):
        return GNode("list", None, tuple(expr_to_gtree(x) for x in e.items))
    if isinstance(e, A.DictLit):
        pairs = tuple(
            GNode("pair", None, (expr_to_gtree(k), expr_to_gtree(v))) for k, v in e.pairs
        )
        return GNode("dict", None, pairs)
    if isinstance(e, A.TupleLit):
        return GNode("tuple", None, tuple(expr_to_gtree(x) for x in e.items))
    if isinstance(e, A.Slice):
        lo = expr_to_gtree(e.lower) if e.lower is not None else GNode("empty")
        up = expr_to_gtree(e.upper) if e.upper is not None else GNode("empty")
        return GNode("slice", None, (lo, up))
    raise TypeError(f"not an expression: {e!r}")


def program_to_gtree(p: A.Program) -> GNode:
    stmts = []
    for stmt in p.stmts:
        if isinstance(stmt, A.Assign):
            stmts.append(GNode("assign", None, (expr_to_gtree(stmt.target), expr_to_gtree(stmt.value))))
        else:
            stmts.append(GNode("exprstmt", None, (expr_to_gtree(stmt.value),)))
    return GNode("program", None, tuple(stmts))


def gtree_to_expr(g: GTree) -> A.Expr:
    if not isinstance(g, GNode):
        raise MalformedTree(f"pattern node in concrete tree: {g!r}")
    tag = g.tag
    if tag == "name":
        return A.NameRef(g.value)
    if tag == "member":
        # a name hole can land a member leaf in an expression slot
        raise MalformedTree("member name outside an attribute")
    if tag == "lit":
        kind, value = g.value
        return A.Literal(value)
    if tag == "attr":
        base, name = g.children
        if not isinstance(name, GNode) or name.tag not in ("member", "name"):
            raise MalformedTree("attribute name must be a name leaf")
        return A.Attr(gtree_to_expr(base), name.value)
    if tag == "subscript":
        base, key = g.children
        return A.Subscript(gtree_to_expr(base), gtree_to_expr(key))
    if tag == "call":
        callee, args, kwargs = g.children
        if not (isinstance(args, GNode) and args.tag == "args"):
            raise MalformedTree("bad call args")
        if not (isinstance(kwargs, GNode) and kwargs.tag == "kwargs"):
            raise MalformedTree("bad call kwargs")
        kw = []
        for k in kwargs.children:
            if not (isinstance(k, GNode) and k.tag == "kw" and len(k.children) == 1):
                raise MalformedTree("bad keyword argument")
            kw.append((k.value, gtree_to_expr(k.children[0])))
        return A.Call(
            gtree_to_expr(callee),
            tuple(gtree_to_expr(a) for a in args.children),
            tuple(kw),
        )
    if tag == "unary":
        (operand,) = g.children
        return A.Unary(g.value, gtree_to_expr(operand))
    if tag == "binary":
        left, right = g.children
        return A.Binary(g.value, gtree_to_expr(left), gtree_to_expr(right))
    if tag == "compare":
        operands = tuple(gtree_to_expr(x) for x in g.children)
        return A.CompareChain(operands, tuple(g.value))
    if tag == "list":
        return A.ListLit(tuple(gtree_to_expr(x) for x in g.children))
    if tag == "dict":
        pairs = []
        for p in g.children:
            if not (isinstance(p, GNode) and p.tag == "pair" and len(p.children) == 2):
                raise MalformedTree("bad dict pair")
            key = gtree_to_expr(p.children[0])
            if not isinstance(key, (A.Literal, A.NameRef)):
                raise MalformedTree("dict keys must be literals or names")
            pairs.append((key, gtree_to_expr(p.children[1])))
        return A.DictLit(tuple(pairs))
    if tag == "tuple":
        return A.TupleLit(tuple(gtree_to_expr(x) for x in g.children))
    if tag == "slice":
        lo, up = g.children
        lower = None if (isinstance(lo, GNode) and lo.tag == "empty") else gtree_to_expr(lo)
        upper = None if (isinstance(up, GNode) and up.tag == "empty") else gtree_to_expr(up)
        return A.Slice(lower, upper)
    raise MalformedTree(f"unexpected tag {tag!r} in expression position")


def gtree_to_program(g: GNode) -> A.Program:
    if g.tag != "program":
        raise MalformedTree("root must be a program node")
    stmts = []
    for s in g.children:
        if not isinstance(s, GNode):
            raise MalformedTree("pattern node in program")
        if s.tag == "assign":
            target = gtree_to_expr(s.children[0])
            if not A.is_lvalue(target):
                raise MalformedTree("assignment target is not an lvalue")
            stmts.append(A.Assign(target, gtree_to_expr(s.children[1])))
        elif s.tag == "exprstmt":
            stmts.append(A.ExprStmt(gtree_to_expr(s.children[0])))
        else:
            raise MalformedTree(f"unexpected statement tag {s.tag!r}")
    if not 1 <= len(stmts) <= 8:
        raise MalformedTree("bad statement count")
    return A.Program(tuple(stmts))


# ----------------------------------------------------------------------
# paths


def iter_paths(g: GNode, path: tuple = ()) -> Iterator[tuple[tuple, GNode]]:
    yield path, g
    for i, child in enumerate(g.children):
        if isinstance(child, GNode):
            yield from iter_paths(child, path + (i,))


def node_at(g: GNode, path: tuple) -> GNode:
    for i in path:
        g = g.children[i]
    return g


def replace_at(g: GNode, path: tuple, new: GTree) -> GTree:
    if not path:
        return new
    i = path[0]
    children = list(g.children)
    children[i] = replace_at(children[i], path[1:], new)
    return GNode(g.tag, g.value, tuple(children))


# ----------------------------------------------------------------------
# matching and instantiation


def hole_admits(kind: str, node: GNode) -> bool:
    if kind == "any_expr":
        return node.tag in EXPR_TAGS
    if kind == "name":
        return node.tag in ("name", "member")
    if kind == "literal":
        return node.tag == "lit"
    return False


def unify(pattern: GTree, node: GNode, bindings: Optional[dict] = None) -> Optional[dict]:
    """Match a guard pattern against a concrete subtree.

    Returns hole bindings on success, None on mismatch.  Repeated hole
    ids must match structurally equal subtrees.
    """
    if bindings is None:
        bindings = {}
    if isinstance(pattern, Hole):
        if not isinstance(node, GNode) or not hole_admits(pattern.kind, node):
            return None
        if pattern.id in bindings:
            return bindings if bindings[pattern.id] == node else None
        bindings[pattern.id] = node
        return bindings
    if isinstance(pattern, Ref):
        raise ValueError("template reference inside a guard")
    if not isinstance(node, GNode):
        return None
    if pattern.tag != node.tag or pattern.value != node.value:
        return None
    if len(pattern.children) != len(node.children):
        return None
    for pc, nc in zip(pattern.children, node.children):
        if unify(pc, nc, bindings) is None:
            return None
    return bindings


def instantiate(template: GTree, bindings: dict) -> GNode:
    if isinstance(template, Ref):
        return bindings[template.id]
    if isinstance(template, Hole):
        raise ValueError("hole inside a template")
    children = tuple(instantiate(c, bindings) for c in template.children)
    return GNode(template.tag, template.value, children)


def pattern_holes(pattern: GTree) -> dict[str, str]:
    """Hole id -> kind, in preorder."""
    out: dict[str, str] = {}

    def visit(n: GTree) -> None:
        if isinstance(n, Hole):
            out.setdefault(n.id, n.kind)
        elif isinstance(n, GNode):
            for c in n.children:
                visit(c)

    visit(pattern)
    return out


def template_refs(template: GTree) -> set[str]:
    out: set[str] = set()

    def visit(n: GTree) -> None:
        if isinstance(n, Ref):
            out.add(n.id)
        elif isinstance(n, GNode):
            for c in n.children:
                visit(c)

    visit(template)
    return out


# ----------------------------------------------------------------------
# rules


@dataclass
class RewriteRule:
    """Guard pattern plus rewrite template, with usage statistics."""

    id: str
    guard: GTree
    template: GTree
    support: int = 1
    fire_count: int = 0
    match_attempts: int = 0
    created_at: float = 0.0

    def __post_init__(self):
        unbound = template_refs(self.template) - set(pattern_holes(self.guard))
        if unbound:
            raise ValueError(f"template references unbound holes: {sorted(unbound)}")


def apply_rule(program: A.Program, rule: RewriteRule) -> list[A.Program]:
    """Instantiate the rule at every match site, one output per site.

    Outputs always parse and unparse/reparse round-trip; duplicates and
    the unchanged program are dropped.
    """
    g = program_to_gtree(program)
    out: list[A.Program] = []
    seen: set[str] = set()
    for path, node in iter_paths(g):
        bindings = unify(rule.guard, node, {})
        if bindings is None:
            continue
        new_sub = instantiate(rule.template, bindings)
        if new_sub == node:
            continue
        new_g = replace_at(g, path, new_sub)
        try:
            candidate = gtree_to_program(new_g)
            text = unparse(candidate)
            if parse(text) != candidate:
                continue
        except (MalformedTree, ParseError, ValueError):
            continue
        if candidate == program or text in seen:
            continue
        seen.add(text)
        out.append(candidate)
    return out


# ----------------------------------------------------------------------
# serialization: nested tagged nodes


def gtree_to_json(g: GTree):
    if isinstance(g, Hole):
        return {"hole": g.id, "kind": g.kind}
    if isinstance(g, Ref):
        return {"ref": g.id}
    node: dict = {"tag": g.tag}
    if g.value is not None:
        node["value"] = list(g.value) if isinstance(g.value, tuple) else g.value
    if g.children:
        node["children"] = [gtree_to_json(c) for c in g.children]
    return node


def gtree_from_json(obj) -> GTree:
    if "hole" in obj:
        return Hole(obj["hole"], obj["kind"])
    if "ref" in obj:
        return Ref(obj["ref"])
    tag = obj["tag"]
    value = obj.get("value")
    if isinstance(value, list):
        value = tuple(value)
    children = tuple(gtree_from_json(c) for c in obj.get("children", []))
    return GNode(tag, value, children)


def rule_to_json(rule: RewriteRule) -> dict:
    return {
        "id": rule.id,
        "guard": gtree_to_json(rule.guard),
        "template": gtree_to_json(rule.template),
        "support": rule.support,
        "fire_count": rule.fire_count,
        "match_attempts": rule.match_attempts,
        "created_at": rule.created_at,
    }


def rule_from_json(obj: dict) -> RewriteRule:
    return RewriteRule(
        id=obj["id"],
        guard=gtree_from_json(obj["guard"]),
        template=gtree_from_json(obj["template"]),
        support=obj.get("support", 1),
        fire_count=obj.get("fire_count", 0),
        match_attempts=obj.get("match_attempts", 0),
        created_at=obj.get("created_at", 0.0),
    )
