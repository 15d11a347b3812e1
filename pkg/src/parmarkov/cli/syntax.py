"""Tokens, object expressions and the term language.

Terms use diagram order: ``f ; g`` runs ``f`` first.  ``*`` is the tensor
and binds tighter than ``;``; both are left-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.origin = None


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, frac, sym, eof
    text: str
    line: int
    column: int


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<frac>\d+/\d+)|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<sym>->|[{}()\[\],:;*=⊤⊥])"
)


def tokenize(text: str) -> list[Token]:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class TokenStream:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def peek_at(self, k: int) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek
        return tok.kind in ("sym", "ident") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.column)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.next()

    def ident(self, what: str = "a name") -> str:
        if self.peek.kind != "ident":
            raise self.error(f"expected {what}")
        return self.next().text

    def integer(self) -> int:
        if self.peek.kind != "int":
            raise self.error("expected an integer")
        return int(self.next().text)

    def end(self):
        if self.peek.kind != "eof":
            raise self.error("unexpected trailing input")


# object expressions ---------------------------------------------------------


@dataclass(frozen=True)
class ObjName:
    name: str


@dataclass(frozen=True)
class ObjUnit:
    pass


@dataclass(frozen=True)
class ObjDist:
    base: object


@dataclass(frozen=True)
class ObjTensor:
    parts: tuple


def parse_obj(ts: TokenStream):
    parts = [_obj_atom(ts)]
    while ts.accept("*"):
        parts.append(_obj_atom(ts))
    if len(parts) == 1:
        return parts[0]
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, ObjTensor) else [p])
    return ObjTensor(tuple(flat))


def _obj_atom(ts: TokenStream):
    if ts.accept("("):
        inner = parse_obj(ts)
        ts.expect(")")
        return inner
    if ts.peek.kind != "ident":
        raise ts.error("expected an object")
    if ts.at("P") and ts.peek_at(1).text == "(":
        ts.next()
        ts.expect("(")
        inner = parse_obj(ts)
        ts.expect(")")
        return ObjDist(inner)
    name = ts.next().text
    return ObjUnit() if name == "I" else ObjName(name)


def print_obj(o) -> str:
    if isinstance(o, ObjName):
        return o.name
    if isinstance(o, ObjUnit):
        return "I"
    if isinstance(o, ObjDist):
        return f"P({print_obj(o.base)})"
    return " * ".join(print_obj(p) for p in o.parts)


# terms ---------------------------------------------------------------------


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Structural:
    """``id``, ``copy``, ``discard``, ``delta`` or ``samp`` of an object; ``swap`` of two."""

    op: str
    objs: tuple


@dataclass(frozen=True)
class Unary:
    """``dom``, ``cond``, ``sharp`` or ``push`` applied to a term."""

    op: str
    arg: object


@dataclass(frozen=True)
class ICopy:
    arg: object
    k: int


@dataclass(frozen=True)
class Seq:
    first: object
    second: object


@dataclass(frozen=True)
class Ten:
    left: object
    right: object


OBJ_OPS = {"id": 1, "copy": 1, "discard": 1, "delta": 1, "samp": 1, "swap": 2}
TERM_OPS = ("dom", "cond", "sharp", "push")


def parse(text: str):
    """Parse a term; raises :class:`ParseError` with a line and column."""
    try:
        ts = TokenStream(text)
        t = parse_term(ts)
        ts.end()
    except ParseError as exc:
        exc.origin = "term"
        raise
    return t


def parse_term(ts: TokenStream):
    t = _tensor(ts)
    while ts.accept(";"):
        t = Seq(t, _tensor(ts))
    return t


def _tensor(ts: TokenStream):
    t = _atom(ts)
    while ts.accept("*"):
        t = Ten(t, _atom(ts))
    return t


def _atom(ts: TokenStream):
    tok = ts.peek
    if ts.accept("("):
        t = parse_term(ts)
        ts.expect(")")
        return t
    if tok.kind != "ident":
        raise ts.error("expected a term")
    ts.next()
    if not ts.at("("):
        return Name(tok.text)
    if tok.text in OBJ_OPS:
        ts.expect("(")
        objs = [parse_obj(ts)]
        for _ in range(OBJ_OPS[tok.text] - 1):
            ts.expect(",")
            objs.append(parse_obj(ts))
        ts.expect(")")
        return Structural(tok.text, tuple(objs))
    if tok.text in TERM_OPS:
        ts.expect("(")
        arg = parse_term(ts)
        ts.expect(")")
        return Unary(tok.text, arg)
    if tok.text == "icopy":
        ts.expect("(")
        arg = parse_term(ts)
        ts.expect(",")
        k = ts.integer()
        ts.expect(")")
        return ICopy(arg, k)
    raise ParseError(f"unknown operation {tok.text!r}", tok.line, tok.column)


def to_text(t) -> str:
    """Print with the fewest parentheses that parse back to the same tree."""
    return _print(t, 0)


def _print(t, level: int) -> str:
    # level 0: inside ';' on the left, 1: inside '*' on the left, 2: an operand that must be atomic
    if isinstance(t, Seq):
        s = f"{_print(t.first, 0)} ; {_print(t.second, 1)}"
        return f"({s})" if level >= 1 else s
    if isinstance(t, Ten):
        s = f"{_print(t.left, 1)} * {_print(t.right, 2)}"
        return f"({s})" if level >= 2 else s
    if isinstance(t, Name):
        return t.name
    if isinstance(t, Structural):
        return f"{t.op}({', '.join(print_obj(o) for o in t.objs)})"
    if isinstance(t, Unary):
        return f"{t.op}({_print(t.arg, 0)})"
    if isinstance(t, ICopy):
        return f"icopy({_print(t.arg, 0)}, {t.k})"
    raise TypeError(f"not a term: {t!r}")
