"""Lexer, parser, AST and canonical unparser for the table-expression language."""

from .ast import (
    ADD, AND, BITNOT, CMP_OPS, DIV, MOD, MUL, NEG, OR, SUB,
    Assign, Attr, Binary, Call, Cell, CompareChain, DictLit, Expr, ExprStmt,
    ListLit, Literal, NameRef, Program, Slice, Stmt, Subscript, TupleLit,
    Unary, child_exprs, free_names, is_lvalue, walk_expr, walk_program,
)
from .lexer import ParseError, Token, tokenize
from .parser import parse, try_parse
from .unparse import unparse, unparse_expr

__all__ = [
    "ADD", "AND", "BITNOT", "CMP_OPS", "DIV", "MOD", "MUL", "NEG", "OR", "SUB",
    "Assign", "Attr", "Binary", "Call", "Cell", "CompareChain", "DictLit",
    "Expr", "ExprStmt", "ListLit", "Literal", "NameRef", "ParseError",
    "Program", "Slice", "Stmt", "Subscript", "Token", "TupleLit", "Unary",
    "child_exprs", "free_names", "is_lvalue", "parse", "tokenize",
    "try_parse", "unparse", "unparse_expr", "walk_expr", "walk_program",
]
