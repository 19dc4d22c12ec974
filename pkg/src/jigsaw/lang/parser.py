"""Recursive-descent parser for the table-expression language.

Expression precedence, lowest to highest:

1. comparison chain (< <= > >= == !=), Python-style chaining
2. |
3. &
4. + -
5. * / %
6. unary ~ -
7. postfix: call, attribute, subscript

Programs are 1..8 statements (assignment or bare expression) separated
by newlines or semicolons.  Subscript keys may contain step-less slices
(``df.loc[:, 'c']``); a trailing bare ``:`` in a tuple key is redundant
in this language (``x.loc[m, :]`` reads the same rows as ``x.loc[m]``)
and is normalized away so equivalent snippets share one tree.
"""

from __future__ import annotations

from . import ast as A
from .lexer import ParseError, Token, tokenize

MAX_STATEMENTS = 8

_CMP_TOKENS = {"<": "lt", "<=": "le", ">": "gt", ">=": "ge", "==": "eq", "!=": "ne"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def advance(self) -> Token:
        tok = self.cur
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at_op(self, text: str) -> bool:
        return self.cur.kind == "OP" and self.cur.text == text

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def error(self, message: str) -> ParseError:
        tok = self.cur
        return ParseError(message, tok.line, tok.col, tok.text)

    # ------------------------------------------------------------------
    # statements

    def parse_program(self) -> A.Program:
        stmts: list[A.Stmt] = []
        self.skip_newlines()
        while self.cur.kind != "EOF":
            stmts.append(self.parse_stmt())
            if self.at_op(";"):
                self.advance()
            elif self.cur.kind == "NEWLINE":
                pass
            elif self.cur.kind != "EOF":
                raise self.error("expected end of statement")
            self.skip_newlines()
        if not stmts:
            raise self.error("empty program")
        if len(stmts) > MAX_STATEMENTS:
            raise ParseError(
                f"too many statements (max {MAX_STATEMENTS})",
                self.cur.line, self.cur.col,
            )
        return A.Program(tuple(stmts))

    def skip_newlines(self) -> None:
        while self.cur.kind == "NEWLINE":
            self.advance()

    def parse_stmt(self) -> A.Stmt:
        if self.cur.kind == "RESERVED":
            raise self.error(f"unsupported statement form {self.cur.text!r}")
        expr = self.parse_expr()
        if self.at_op("="):
            eq = self.advance()
            if not A.is_lvalue(expr):
                raise ParseError("invalid assignment target", eq.line, eq.col, "=")
            value = self.parse_expr()
            if self.at_op("="):
                raise self.error("chained assignment is not supported")
            return A.Assign(target=expr, value=value)
        return A.ExprStmt(expr)

    # ------------------------------------------------------------------
    # expressions

    def parse_expr(self) -> A.Expr:
        return self.parse_compare()

    def parse_compare(self) -> A.Expr:
        first = self.parse_bitor()
        operands = [first]
        ops: list[str] = []
        while self.cur.kind == "OP" and self.cur.text in _CMP_TOKENS:
            ops.append(_CMP_TOKENS[self.advance().text])
            operands.append(self.parse_bitor())
        if not ops:
            return first
        return A.CompareChain(tuple(operands), tuple(ops))

    def parse_bitor(self) -> A.Expr:
        left = self.parse_bitand()
        while self.at_op("|"):
            self.advance()
            left = A.Binary(A.OR, left, self.parse_bitand())
        return left

    def parse_bitand(self) -> A.Expr:
        left = self.parse_arith()
        while self.at_op("&"):
            self.advance()
            left = A.Binary(A.AND, left, self.parse_arith())
        return left

    def parse_arith(self) -> A.Expr:
        left = self.parse_term()
        while self.cur.kind == "OP" and self.cur.text in "+-" and len(self.cur.text) == 1:
            op = A.ADD if self.advance().text == "+" else A.SUB
            left = A.Binary(op, left, self.parse_term())
        return left

    def parse_term(self) -> A.Expr:
        left = self.parse_unary()
        ops = {"*": A.MUL, "/": A.DIV, "%": A.MOD}
        while self.cur.kind == "OP" and self.cur.text in ops:
            op = ops[self.advance().text]
            left = A.Binary(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> A.Expr:
        if self.at_op("~"):
            self.advance()
            return A.Unary(A.BITNOT, self.parse_unary())
        if self.at_op("-"):
            self.advance()
            return A.Unary(A.NEG, self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self) -> A.Expr:
        expr = self.parse_atom()
        while True:
            if self.at_op("."):
                self.advance()
                if self.cur.kind != "NAME":
                    raise self.error("expected attribute name after '.'")
                expr = A.Attr(expr, self.advance().text)
            elif self.at_op("("):
                self.advance()
                args, kwargs = self.parse_call_args()
                expr = A.Call(expr, args, kwargs)
            elif self.at_op("["):
                self.advance()
                key = self.parse_subscript_key()
                self.expect_op("]")
                expr = A.Subscript(expr, _normalize_key(key))
            else:
                return expr

    def parse_call_args(self) -> tuple[tuple[A.Expr, ...], tuple[tuple[str, A.Expr], ...]]:
        args: list[A.Expr] = []
        kwargs: list[tuple[str, A.Expr]] = []
        while not self.at_op(")"):
            if (
                self.cur.kind == "NAME"
                and self.peek().kind == "OP"
                and self.peek().text == "="
            ):
                name = self.advance().text
                self.advance()  # '='
                kwargs.append((name, self.parse_expr()))
            else:
                if kwargs:
                    raise self.error("positional argument after keyword argument")
                args.append(self.parse_expr())
            if self.at_op(","):
                self.advance()
            elif not self.at_op(")"):
                raise self.error("expected ',' or ')' in call arguments")
        self.expect_op(")")
        return tuple(args), tuple(kwargs)

    def parse_subscript_key(self) -> A.Expr:
        items = [self.parse_key_item()]
        while self.at_op(","):
            self.advance()
            items.append(self.parse_key_item())
        if len(items) == 1:
            return items[0]
        return A.TupleLit(tuple(items))

    def parse_key_item(self) -> A.Expr:
        if self.at_op(":"):
            self.advance()
            upper = None
            if not (self.at_op("]") or self.at_op(",")):
                upper = self.parse_expr()
            return A.Slice(None, upper)
        expr = self.parse_expr()
        if self.at_op(":"):
            self.advance()
            upper = None
            if not (self.at_op("]") or self.at_op(",")):
                upper = self.parse_expr()
            return A.Slice(expr, upper)
        return expr

    def parse_atom(self) -> A.Expr:
        tok = self.cur
        if tok.kind == "NAME":
            self.advance()
            return A.NameRef(tok.text)
        if tok.kind == "INT":
            self.advance()
            return A.Literal(int(tok.text))
        if tok.kind == "FLOAT":
            self.advance()
            return A.Literal(float(tok.text))
        if tok.kind == "STRING":
            self.advance()
            return A.Literal(tok.text)
        if tok.kind == "TRUE":
            self.advance()
            return A.Literal(True)
        if tok.kind == "FALSE":
            self.advance()
            return A.Literal(False)
        if tok.kind == "NONE":
            self.advance()
            return A.Literal(None)
        if tok.kind == "RESERVED":
            raise self.error(f"reserved word {tok.text!r} is outside the subset")
        if self.at_op("("):
            self.advance()
            first = self.parse_expr()
            if self.at_op(","):
                items = [first]
                while self.at_op(","):
                    self.advance()
                    if self.at_op(")"):
                        break
                    items.append(self.parse_expr())
                self.expect_op(")")
                return A.TupleLit(tuple(items))
            self.expect_op(")")
            return first
        if self.at_op("["):
            self.advance()
            items = []
            while not self.at_op("]"):
                items.append(self.parse_expr())
                if self.at_op(","):
                    self.advance()
                elif not self.at_op("]"):
                    raise self.error("expected ',' or ']' in list")
            self.expect_op("]")
            return A.ListLit(tuple(items))
        if self.at_op("{"):
            self.advance()
            pairs = []
            while not self.at_op("}"):
                key = self.parse_dict_key()
                self.expect_op(":")
                pairs.append((key, self.parse_expr()))
                if self.at_op(","):
                    self.advance()
                elif not self.at_op("}"):
                    raise self.error("expected ',' or '}' in dict")
            self.expect_op("}")
            return A.DictLit(tuple(pairs))
        raise self.error("expected an expression")

    def parse_dict_key(self) -> A.Expr:
        tok = self.cur
        if tok.kind in ("INT", "FLOAT", "STRING", "TRUE", "FALSE", "NONE", "NAME"):
            key = self.parse_atom()
            if not self.at_op(":"):
                raise self.error("dict keys must be literals or names")
            return key
        if self.at_op("-") and self.peek().kind in ("INT", "FLOAT"):
            self.advance()
            num = self.parse_atom()
            assert isinstance(num, A.Literal)
            return A.Literal(-num.value)  # type: ignore[operator]
        raise self.error("dict keys must be literals or names")


def _is_full_slice(e: A.Expr) -> bool:
    return isinstance(e, A.Slice) and e.lower is None and e.upper is None


def _normalize_key(key: A.Expr) -> A.Expr:
    # x[m, :] selects the same as x[m]; fold so both spellings share a tree.
    if isinstance(key, A.TupleLit):
        items = list(key.items)
        while len(items) > 1 and _is_full_slice(items[-1]):
            items.pop()
        if len(items) == 1:
            return items[0]
        return A.TupleLit(tuple(items))
    return key


def parse(source: str) -> A.Program:
    """Parse source text into a Program; raises ParseError on any problem."""
    try:
        tokens = tokenize(source)
        return _Parser(tokens).parse_program()
    except ParseError:
        raise
    except RecursionError:
        raise ParseError("expression nesting too deep", 1, 1) from None


def try_parse(source: str) -> A.Program | ParseError:
    """Total variant of parse: returns the error instead of raising."""
    try:
        return parse(source)
    except ParseError as err:
        return err
