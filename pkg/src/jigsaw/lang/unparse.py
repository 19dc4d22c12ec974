"""Canonical unparser: single space around '=' and binary operators,
single-quoted strings, minimal parentheses under the precedence table.
parse(unparse(p)) is structurally equal to p.
"""

from __future__ import annotations

from . import ast as A

_PREC_COMPARE = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_ADD = 4
_PREC_MUL = 5
_PREC_UNARY = 6
_PREC_POSTFIX = 7
_PREC_ATOM = 8

_BINARY_PREC = {
    A.OR: _PREC_OR,
    A.AND: _PREC_AND,
    A.ADD: _PREC_ADD,
    A.SUB: _PREC_ADD,
    A.MUL: _PREC_MUL,
    A.DIV: _PREC_MUL,
    A.MOD: _PREC_MUL,
}


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.CompareChain):
        return _PREC_COMPARE
    if isinstance(e, A.Binary):
        return _BINARY_PREC[e.op]
    if isinstance(e, A.Unary):
        return _PREC_UNARY
    if isinstance(e, (A.Attr, A.Subscript, A.Call)):
        return _PREC_POSTFIX
    return _PREC_ATOM


def _string(s: str) -> str:
    body = s.replace("\\", "\\\\").replace("'", "\\'")
    body = body.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f"'{body}'"


def _literal(value: A.Cell) -> str:
    if value is None:
        return "None"
    if value is True:
        return "True"
    if value is False:
        return "False"
    if isinstance(value, str):
        return _string(value)
    return repr(value)


def _render(e: A.Expr, min_prec: int = 0) -> str:
    text = _render_raw(e)
    if _prec(e) < min_prec:
        return f"({text})"
    return text


def _render_raw(e: A.Expr) -> str:
    if isinstance(e, A.NameRef):
        return e.id
    if isinstance(e, A.Literal):
        return _literal(e.value)
    if isinstance(e, A.Attr):
        base = _render(e.base, _PREC_POSTFIX)
        # 0.x would merge into a number token; (0).x reparses correctly
        if isinstance(e.base, A.Literal) and isinstance(e.base.value, (int, float)) \
                and not isinstance(e.base.value, bool):
            base = f"({base})"
        return f"{base}.{e.name}"
    if isinstance(e, A.Subscript):
        return f"{_render(e.base, _PREC_POSTFIX)}[{_render_key(e.key)}]"
    if isinstance(e, A.Call):
        parts = [_render(a) for a in e.args]
        parts += [f"{k}={_render(v)}" for k, v in e.kwargs]
        return f"{_render(e.callee, _PREC_POSTFIX)}({', '.join(parts)})"
    if isinstance(e, A.Unary):
        sym = "~" if e.op == A.BITNOT else "-"
        return f"{sym}{_render(e.operand, _PREC_UNARY)}"
    if isinstance(e, A.Binary):
        prec = _BINARY_PREC[e.op]
        sym = A.BINARY_SYMBOLS[e.op]
        return f"{_render(e.left, prec)} {sym} {_render(e.right, prec + 1)}"
    if isinstance(e, A.CompareChain):
        out = [_render(e.operands[0], _PREC_COMPARE + 1)]
        for op, operand in zip(e.ops, e.operands[1:]):
            out.append(A.CMP_SYMBOLS[op])
            out.append(_render(operand, _PREC_COMPARE + 1))
        return " ".join(out)
    if isinstance(e, A.ListLit):
        return "[" + ", ".join(_render(x) for x in e.items) + "]"
    if isinstance(e, A.DictLit):
        return "{" + ", ".join(f"{_render(k)}: {_render(v)}" for k, v in e.pairs) + "}"
    if isinstance(e, A.TupleLit):
        inner = ", ".join(_render(x) for x in e.items)
        if len(e.items) == 1:
            inner += ","
        return f"({inner})"
    if isinstance(e, A.Slice):
        lo = _render(e.lower) if e.lower is not None else ""
        hi = _render(e.upper) if e.upper is not None else ""
        return f"{lo}:{hi}"
    raise TypeError(f"not an expression node: {e!r}")


def _render_key(key: A.Expr) -> str:
    # tuple keys print without parentheses inside subscripts: df.loc[3, 'C']
    if isinstance(key, A.TupleLit):
        return ", ".join(_render(x) for x in key.items)
    return _render(key)


def unparse_expr(e: A.Expr) -> str:
    return _render(e)


def unparse(p: A.Program) -> str:
    """Render a Program in canonical form, one statement per line."""
    lines = []
    for stmt in p.stmts:
        if isinstance(stmt, A.Assign):
            lines.append(f"{_render(stmt.target)} = {_render(stmt.value)}")
        else:
            lines.append(_render(stmt.value))
    return "\n".join(lines)
