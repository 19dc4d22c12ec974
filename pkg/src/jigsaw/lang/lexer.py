"""Tokenizer for the table-expression language."""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    """Raised on any lexical or syntactic problem; carries the position."""

    def __init__(self, message: str, line: int, col: int, lexeme: str = ""):
        self.message = message
        self.line = line
        self.col = col
        self.lexeme = lexeme
        at = f" at line {line}, col {col}"
        near = f" near {lexeme!r}" if lexeme else ""
        super().__init__(message + at + near)


@dataclass(frozen=True)
class Token:
    kind: str  # NAME INT FLOAT STRING OP NEWLINE EOF TRUE FALSE NONE RESERVED
    text: str
    line: int
    col: int


# Statement forms outside the expression subset; rejected with a clear error.
RESERVED_WORDS = {
    "def", "for", "while", "if", "elif", "else", "lambda", "import", "from",
    "class", "return", "with", "try", "except", "finally", "in", "not",
    "and", "or", "is", "del", "yield", "global", "nonlocal", "pass", "as",
    "assert", "raise", "async", "await",
}

_KEYWORD_KINDS = {"True": "TRUE", "False": "FALSE", "None": "NONE"}

_TWO_CHAR_OPS = ("==", "!=", "<=", ">=")
_ONE_CHAR_OPS = set("=<>|&+-*/%~.,:()[]{};")

_ESCAPES = {"\\": "\\", "'": "'", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            tokens.append(Token("NEWLINE", "\n", line, col))
            i += 1
            line += 1
            col = 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == "#":
            while i < n and source[i] != "\n":
                i += 1
        elif c.isdigit():
            start, start_col = i, col
            while i < n and source[i].isdigit():
                i += 1
            is_float = False
            if i < n and source[i] == "." and (i + 1 >= n or source[i + 1] != "."):
                is_float = True
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    is_float = True
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
            text = source[start:i]
            tokens.append(Token("FLOAT" if is_float else "INT", text, line, start_col))
            col += i - start
        elif c in "'\"":
            quote = c
            start_line, start_col = line, col
            i += 1
            col += 1
            out: list[str] = []
            closed = False
            while i < n:
                ch = source[i]
                if ch == "\n":
                    break
                if ch == "\\" and i + 1 < n:
                    esc = source[i + 1]
                    out.append(_ESCAPES.get(esc, "\\" + esc))
                    i += 2
                    col += 2
                    continue
                if ch == quote:
                    closed = True
                    i += 1
                    col += 1
                    break
                out.append(ch)
                i += 1
                col += 1
            if not closed:
                raise ParseError("unterminated string literal", start_line, start_col, quote)
            tokens.append(Token("STRING", "".join(out), start_line, start_col))
        elif c.isalpha() or c == "_":
            start, start_col = i, col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            col += i - start
            if text in _KEYWORD_KINDS:
                tokens.append(Token(_KEYWORD_KINDS[text], text, line, start_col))
            elif text in RESERVED_WORDS:
                tokens.append(Token("RESERVED", text, line, start_col))
            else:
                tokens.append(Token("NAME", text, line, start_col))
        elif source[i : i + 2] in _TWO_CHAR_OPS:
            tokens.append(Token("OP", source[i : i + 2], line, col))
            i += 2
            col += 2
        elif c in _ONE_CHAR_OPS:
            tokens.append(Token("OP", c, line, col))
            i += 1
            col += 1
        else:
            raise ParseError("unknown token", line, col, c)
    tokens.append(Token("EOF", "", line, col))
    return tokens
