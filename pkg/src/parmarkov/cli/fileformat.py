"""The plain-text declaration format shared by the CLI and the law suite.

::

    object X = {a, b}
    object Y = {u, v}
    kernel f : X -> Y over qnonneg { a -> { u: 1/2, v: 1/2 }  b -> { u: 1 } }
    partial g : X -> Y on {a} over qnonneg { a -> { u: 1 } }
    algebra A on all over bool { {0} -> 0  {1} -> 1  {0, 1} -> 1 }
    cone c : X * X -> Y, Y { leg {0, 1} = g * g  leg {0} = ... }

Elements of tensor objects are written ``(a, u)``, elements of ``P(X)`` as
sets ``{a, b}`` and the unit object is ``I``.  Names are file-scoped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .. import finmarkov as fm
from .. import parkernel as pk
from ..finmarkov import FinObject, Kernel, SetLabel, ShapeError, format_element
from ..parkernel import ParMap, Subobject
from ..semiring import QNONNEG, Semiring, get_semiring
from .syntax import ObjDist, ObjName, ObjUnit, ParseError, TokenStream, parse_obj, parse_term


@dataclass
class ConeDecl:
    name: str
    apex: object
    objects: list
    legs: dict  # index tuple -> Term


@dataclass
class AlgebraDecl:
    name: str
    carrier: str
    domain: list | None  # set literals, or None for the whole of PA
    action: list  # (set literal, element literal)
    semiring: Semiring


@dataclass
class Env:
    semiring: Semiring = QNONNEG
    objects: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    algebras: list = field(default_factory=list)
    cones: list = field(default_factory=list)

    def resolve_obj(self, expr, semiring: Semiring | None = None) -> FinObject:
        from .. import representability as rp

        sr = semiring or self.semiring
        if isinstance(expr, ObjUnit):
            return fm.UNIT
        if isinstance(expr, ObjName):
            if expr.name not in self.objects:
                raise KeyError(f"unknown object {expr.name!r}")
            return self.objects[expr.name]
        if isinstance(expr, ObjDist):
            base = self.resolve_obj(expr.base, sr)
            return rp.dist_object(base, sr).carrier
        return fm.tensor(*(self.resolve_obj(p, sr) for p in expr.parts))


# literal keys ----------------------------------------------------------------
# Literals and object elements are compared through hashable keys so that set
# literals match regardless of the order their members are written in.


def _atom_key(a):
    if isinstance(a, SetLabel):
        return ("set", frozenset(element_key(e) for e in a))
    if isinstance(a, tuple):
        return ("tup", tuple(_atom_key(x) for x in a))
    return str(a)


def element_key(e: tuple):
    if len(e) == 1:
        return _atom_key(e[0])
    return ("tup", tuple(_atom_key(a) for a in e))


def _literal_key(lit):
    kind, val = lit
    if kind == "atom":
        return str(val)
    if kind == "set":
        return ("set", frozenset(_literal_key(m) for m in val))
    flat = []
    for m in val:
        k = _literal_key(m)
        if isinstance(k, tuple) and k[0] == "tup":
            flat.extend(k[1])
        else:
            flat.append(k)
    return ("tup", tuple(flat))


def parse_literal(ts: TokenStream):
    tok = ts.peek
    if tok.kind == "ident":
        return ("atom", ts.next().text)
    if tok.kind == "int":
        return ("atom", int(ts.next().text))
    for opener, closer, kind in (("{", "}", "set"), ("(", ")", "tup")):
        if ts.accept(opener):
            members = []
            if not ts.at(closer):
                members.append(parse_literal(ts))
                while ts.accept(","):
                    members.append(parse_literal(ts))
            ts.expect(closer)
            return (kind, tuple(members))
    raise ts.error("expected an element")


@lru_cache(maxsize=256)
def _key_table(o: FinObject) -> dict:
    return {element_key(e): e for e in o.elements}


def _lookup(o: FinObject, lit, tok) -> tuple:
    table = _key_table(o)
    key = _literal_key(lit)
    if key not in table:
        raise ParseError(f"{_show(lit)} is not an element of {o}", tok.line, tok.column)
    return table[key]


def _show(lit) -> str:
    kind, val = lit
    if kind == "atom":
        return str(val)
    inner = ", ".join(_show(m) for m in val)
    return "{" + inner + "}" if kind == "set" else "(" + inner + ")"


def _element(ts: TokenStream, o: FinObject) -> tuple:
    tok = ts.peek
    return _lookup(o, parse_literal(ts), tok)


def _weight(ts: TokenStream, sr: Semiring):
    tok = ts.next()
    if tok.kind not in ("int", "frac", "ident") and tok.text not in ("⊤", "⊥"):
        raise ts.error("expected a weight", tok)
    try:
        return sr.parse(tok.text)
    except ValueError as exc:
        raise ParseError(str(exc), tok.line, tok.column) from exc


def _over(ts: TokenStream, env: Env) -> Semiring:
    if ts.accept("over"):
        tok = ts.peek
        name = ts.ident("a semiring")
        try:
            return get_semiring(name)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from exc
    return env.semiring


def _columns(ts: TokenStream, source: FinObject, target: FinObject, sr: Semiring) -> dict:
    ts.expect("{")
    cols = {}
    while not ts.accept("}"):
        tok = ts.peek
        x = _element(ts, source)
        if x in cols:
            raise ParseError(f"column {format_element(x)} given twice", tok.line, tok.column)
        ts.expect("->")
        ts.expect("{")
        col = {}
        while not ts.accept("}"):
            y = _element(ts, target)
            ts.expect(":")
            col[y] = _weight(ts, sr)
            if not ts.at("}"):
                ts.expect(",")
        cols[x] = col
    return cols


def _signature(ts: TokenStream):
    start = ts.peek
    src = parse_obj(ts)
    ts.expect("->")
    tgt = parse_obj(ts)
    return src, tgt, start


def _checked(build, tok):
    try:
        return build()
    except (ShapeError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        raise ParseError(msg, tok.line, tok.column) from exc


def parse_file(text: str, semiring: Semiring | None = None) -> Env:
    """Read declarations.  Without an explicit ``semiring`` the environment
    takes the instance shared by all declared maps, falling back to qnonneg."""
    env = Env(semiring or QNONNEG)
    ts = TokenStream(text)
    while ts.peek.kind != "eof":
        tok = ts.peek
        keyword = ts.ident("a declaration")
        if keyword == "object":
            _object_decl(ts, env)
        elif keyword in ("kernel", "partial"):
            _map_decl(ts, env, keyword == "partial")
        elif keyword == "algebra":
            _algebra_decl(ts, env)
        elif keyword == "cone":
            _cone_decl(ts, env)
        else:
            raise ParseError(f"unknown declaration {keyword!r}", tok.line, tok.column)
    if semiring is None:
        used = {u.semiring for u in env.maps.values()} | {a.semiring for a in env.algebras}
        if len(used) == 1:
            env.semiring = used.pop()
    return env


def _object_decl(ts: TokenStream, env: Env):
    name = ts.ident("an object name")
    ts.expect("=")
    if ts.accept("{"):
        labels = []
        if not ts.at("}"):
            labels.append(parse_literal(ts))
            while ts.accept(","):
                labels.append(parse_literal(ts))
        close = ts.expect("}")
        atoms = []
        for kind, val in labels:
            if kind != "atom":
                raise ParseError("object labels must be names or integers", close.line, close.column)
            atoms.append(val)
        if len(set(map(str, atoms))) != len(atoms):
            raise ParseError(f"object {name} has repeated labels", close.line, close.column)
        env.objects[name] = fm.obj(*atoms, name=name)
    else:
        tok = ts.peek
        expr = parse_obj(ts)
        o = _checked(lambda: env.resolve_obj(expr), tok)
        env.objects[name] = fm.FinObject(o.elements, o.arity, factors=o.factors, name=name)


def _map_decl(ts: TokenStream, env: Env, is_partial: bool):
    name = ts.ident("a map name")
    ts.expect(":")
    src_e, tgt_e, sig_tok = _signature(ts)
    dom_lits = None
    if is_partial:
        ts.expect("on")
        dom_tok = ts.peek
        kind, dom_lits = parse_literal(ts)
        if kind != "set":
            raise ParseError("the domain must be a set of elements", dom_tok.line, dom_tok.column)
    sr = _over(ts, env)
    source = _checked(lambda: env.resolve_obj(src_e, sr), sig_tok)
    target = _checked(lambda: env.resolve_obj(tgt_e, sr), sig_tok)
    body_tok = ts.peek
    cols = _columns(ts, source, target, sr)
    if is_partial:
        dom = Subobject.of(source, [_lookup(source, lit, dom_tok) for lit in dom_lits])
        if set(cols) != dom.element_set:
            raise ParseError(f"columns of {name} do not match its declared domain", body_tok.line, body_tok.column)
        env.maps[name] = _checked(lambda: pk.partial(source, target, sr, cols), body_tok)
    else:
        env.maps[name] = _checked(lambda: pk.lift(Kernel(source, target, sr, cols)), body_tok)


def _algebra_decl(ts: TokenStream, env: Env):
    carrier = ts.ident("the carrier object")
    tok = ts.peek
    if carrier not in env.objects:
        raise ParseError(f"unknown object {carrier!r}", tok.line, tok.column)
    ts.expect("on")
    if ts.accept("all"):
        domain = None
    else:
        dom_tok = ts.peek
        kind, domain = parse_literal(ts)
        if kind != "set":
            raise ParseError("the domain must be a set of distributions", dom_tok.line, dom_tok.column)
        domain = list(domain)
    sr = _over(ts, env)
    ts.expect("{")
    action = []
    while not ts.accept("}"):
        d = parse_literal(ts)
        ts.expect("->")
        action.append((d, parse_literal(ts), tok))
    env.algebras.append(AlgebraDecl(carrier, carrier, domain, action, sr))


def _cone_decl(ts: TokenStream, env: Env):
    name = ts.ident("a cone name")
    ts.expect(":")
    apex = parse_obj(ts)
    ts.expect("->")
    objects = [parse_obj(ts)]
    while ts.accept(","):
        objects.append(parse_obj(ts))
    ts.expect("{")
    legs = {}
    while not ts.accept("}"):
        ts.expect("leg")
        tok = ts.peek
        kind, members = parse_literal(ts)
        if kind != "set" or any(m[0] != "atom" or not isinstance(m[1], int) for m in members):
            raise ParseError("a leg index must be a set of integers", tok.line, tok.column)
        ts.expect("=")
        legs[tuple(sorted(m[1] for m in members))] = parse_term(ts)
    env.cones.append(ConeDecl(name, apex, objects, legs))


# printing ----------------------------------------------------------------------


def object_text(o: FinObject) -> str:
    if o.arity == 0:
        return "I"
    if o.name and " ⊗ " not in o.name:
        return o.name
    if o.factors and len(o.factors) > 1:
        return " * ".join(object_text(f) for f in o.factors)
    return o.name.replace(" ⊗ ", " * ") if o.name else "{" + ", ".join(format_element(e) for e in o.elements) + "}"


def object_decl(o: FinObject) -> str:
    return f"object {o.name} = {{{', '.join(format_element(e) for e in o.elements)}}}"


def _column_text(col: dict, target: FinObject, sr: Semiring) -> str:
    idx = target.index
    items = sorted(col.items(), key=lambda kv: idx[kv[0]])
    return "{ " + ", ".join(f"{format_element(y)}: {sr.format(w)}" for y, w in items) + " }" if items else "{ }"


def map_text(name: str, u: ParMap) -> str:
    sr = u.semiring
    sig = f"{name} : {object_text(u.source)} -> {object_text(u.target)}"
    body = "  ".join(f"{format_element(x)} -> {_column_text(u.ker.columns[x], u.target, sr)}" for x in u.dom.elements)
    body = f"{{ {body} }}" if body else "{ }"
    if u.dom.is_full():
        return f"kernel {sig} over {sr.tag} {body}"
    dom = "{" + ", ".join(format_element(x) for x in u.dom.elements) + "}"
    return f"partial {sig} on {dom} over {sr.tag} {body}"


def kernel_text(name: str, k: Kernel) -> str:
    """A possibly sub-normalized kernel; every source element gets a line."""
    sr = k.semiring
    body = "  ".join(
        f"{format_element(x)} -> {_column_text(k.columns.get(x, {}), k.target, sr)}" for x in k.source.elements
    )
    return f"matrix {name} : {object_text(k.source)} -> {object_text(k.target)} over {sr.tag} {{ {body} }}"


def declarations(named_maps: list[tuple[str, ParMap]]) -> str:
    """Object and map declarations that reproduce the given maps."""
    seen = set()
    lines = []
    for _, u in named_maps:
        for o in (u.source, u.target):
            for f in (o.factors or ()) if o.arity else ():
                if f.name and f.name not in seen:
                    seen.add(f.name)
                    lines.append(object_decl(f))
    for name, u in named_maps:
        lines.append(map_text(name, u))
    return "\n".join(lines)
