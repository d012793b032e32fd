"""Tokenizer and canonical text form for the Solidity subset.

Statement text stored in the AST is always re-serialized from tokens via
`join_tokens`, so the canonical form is a fixpoint: tokenizing canonical
text and joining again reproduces it byte for byte. That property is what
makes parse/render round-trips structural no-ops.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import ParseError

MULTI_OPS = (
    "=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "++", "--",
)
SINGLE_OPS = "{}()[];,.:?!=<>+-*/%&|^~"

# binary/assignment operators rendered with a space on both sides
_SPACED_OPS = {
    "=", "==", "!=", "<=", ">=", "<", ">", "&&", "||",
    "+", "-", "*", "/", "%", "+=", "-=", "*=", "/=", "=>", "?",
}


@dataclass(frozen=True)
class Token:
    value: str
    line: int
    column: int
    offset: int = -1  # absolute start index in the source text

    @property
    def end(self) -> int:
        return self.offset + len(self.value)

    @property
    def is_ident(self) -> bool:
        c = self.value[0]
        return c.isalpha() or c == "_"

    @property
    def is_number(self) -> bool:
        return self.value[0].isdigit()

    @property
    def is_string(self) -> bool:
        return self.value[0] in "\"'"


def tokenize(source: str) -> list[Token]:
    """Split source into tokens, dropping comments. Raises ParseError on
    unterminated strings or block comments."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise ParseError("unterminated block comment", line, col)
            skipped = source[i : j + 2]
            line += skipped.count("\n")
            col = 1 if "\n" in skipped else col + len(skipped)
            i = j + 2
            continue
        if c in "\"'":
            j = i + 1
            while j < n and source[j] != c:
                if source[j] == "\\":
                    j += 1
                if source[j] == "\n":
                    raise ParseError("unterminated string literal", line, col)
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", line, col)
            tokens.append(Token(source[i : j + 1], line, col, i))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token(source[i:j], line, col, i))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token(source[i:j], line, col, i))
            col += j - i
            i = j
            continue
        matched = None
        for op in MULTI_OPS:
            if source.startswith(op, i):
                matched = op
                break
        if matched:
            tokens.append(Token(matched, line, col, i))
            i += len(matched)
            col += len(matched)
            continue
        if c in SINGLE_OPS:
            tokens.append(Token(c, line, col, i))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    return tokens


def _word_like(v: str) -> bool:
    c = v[0]
    return c.isalnum() or c == "_" or c in "\"'"


def join_tokens(values: list[str]) -> str:
    """Canonical single-line rendering of a token value sequence.

    Used for statement text inside function bodies, so `{` here only ever
    appears in call options (`call{value: x}`) and is rendered tight.
    """
    out: list[str] = []
    prev = ""
    for v in values:
        if not out:
            out.append(v)
            prev = v
            continue
        space = _needs_space(prev, v)
        out.append(" " + v if space else v)
        prev = v
    return "".join(out)


def _needs_space(a: str, b: str) -> bool:
    if b in (";", ",", ")", "]", "}", ".", "[", "{", "++", "--"):
        return False
    if a in ("(", "[", "{", ".", "!", "~", "^"):
        return False
    if b == "(":
        # call-style tight: ident(, ){, )( and ]( and ""(
        if _word_like(a) and a not in ("if", "return", "else", "while", "for"):
            return False
        if a in (")", "]", "}"):
            return False
        return True
    if b == ":":
        return False
    if a == ":":
        return True
    if a in _SPACED_OPS or b in _SPACED_OPS:
        return True
    if a in (")", "]") and _word_like(b):
        return True
    if _word_like(a) and _word_like(b):
        return True
    return True


class TokenCursor:
    """Sequential reader over a token list with bracket-aware helpers."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self, offset: int = 0) -> Token | None:
        p = self.pos + offset
        return self.tokens[p] if p < len(self.tokens) else None

    def peek_value(self, offset: int = 0) -> str:
        t = self.peek(offset)
        return t.value if t else ""

    def advance(self) -> Token:
        if self.at_end():
            last = self.tokens[-1] if self.tokens else Token("", 0, 0)
            raise ParseError("unexpected end of input", last.line, last.column)
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, value: str) -> Token:
        t = self.peek()
        if t is None or t.value != value:
            got = t.value if t else "end of input"
            line = t.line if t else (self.tokens[-1].line if self.tokens else 0)
            col = t.column if t else 0
            raise ParseError(f"expected {value!r}, got {got!r}", line, col)
        return self.advance()

    def take_until(self, stop: str) -> list[Token]:
        """Consume tokens up to (not including) `stop` at bracket depth 0."""
        depth = 0
        taken: list[Token] = []
        while not self.at_end():
            v = self.peek_value()
            if depth == 0 and v == stop:
                return taken
            if v in "([{":
                depth += 1
            elif v in ")]}":
                depth -= 1
                if depth < 0:
                    t = self.peek()
                    raise ParseError(f"unbalanced {v!r}", t.line, t.column)
            taken.append(self.advance())
        last = self.tokens[-1] if self.tokens else Token("", 0, 0)
        raise ParseError(f"expected {stop!r} before end of input", last.line, last.column)

    def take_group(self) -> list[Token]:
        """Consume a balanced (...) / {...} / [...] group, returning the
        inner tokens (delimiters excluded)."""
        open_tok = self.advance()
        pairs = {"(": ")", "{": "}", "[": "]"}
        if open_tok.value not in pairs:
            raise ParseError(
                f"expected group, got {open_tok.value!r}", open_tok.line, open_tok.column
            )
        close = pairs[open_tok.value]
        depth = 1
        inner: list[Token] = []
        while not self.at_end():
            t = self.advance()
            if t.value in pairs:
                depth += 1
            elif t.value in pairs.values():
                if t.value == close and depth == 1:
                    return inner
                depth -= 1
                if depth < 1:
                    raise ParseError(f"unbalanced {t.value!r}", t.line, t.column)
            inner.append(t)
        raise ParseError(
            f"unclosed {open_tok.value!r}", open_tok.line, open_tok.column
        )
