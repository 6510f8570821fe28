"""A small shared lexer for the textual formats.

Produces a flat token list with line/column positions; hash comments run to
end of line. Free-form formats (formulas, programs, proof trees) parse from
these tokens, while the line-oriented table formats split lines directly.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    """A syntax error, carrying the 1-based line and column of the offender."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_SYMBOLS = [
    "|>", "->", ":=", "<$",
    "(", ")", "<", ">", "[", "]", "{", "}",
    ",", ":", ";", "*", "&", "|", "~", "=", "!", "/", "@", ".",
]


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c in "_'"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            chars = []
            while True:
                if i >= n:
                    raise ParseError("unterminated string", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                chars.append(c)
                i += 1
            tokens.append(Token("str", "".join(chars), start_line, start_col))
            continue
        if _is_ident_start(c):
            j = i
            while j < n:
                if _is_ident_char(text[j]):
                    j += 1
                elif text[j] == "-" and j + 1 < n and text[j + 1].isalnum():
                    # hyphenated names like Indep-1; a lone '-' before '>' stays an arrow
                    j += 2
                else:
                    break
            word = text[i:j]
            tokens.append(Token("id", word, line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class TokenStream:
    """Cursor over a token list with one-token lookahead helpers."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def accept(self, kind: str) -> Token | None:
        if self.at(kind):
            return self.next()
        return None

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            label = what or repr(kind)
            found = tok.text or tok.kind
            raise ParseError(f"expected {label}, found {found!r}", tok.line, tok.col)
        return self.next()

    def error(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)
