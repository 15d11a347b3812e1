"""Partial kernels: spans ``X ↩ D → Y`` with ``D`` a subset of ``X``.

Every deterministic subobject of a finite carrier is a subset inclusion, so
each span-equivalence class has exactly one representative with ``D``
stored as a subset in the source's order.  Equality of :class:`ParMap` is
therefore plain structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from . import finmarkov as fm
from .finmarkov import FinObject, Kernel, ShapeError, format_element
from .semiring import InstanceMismatch, Semiring


@dataclass(frozen=True)
class Subobject:
    ambient: FinObject
    elements: tuple

    def __post_init__(self):
        idx = self.ambient.index
        for e in self.elements:
            if e not in idx:
                raise ShapeError(f"{format_element(e)} is not an element of {self.ambient}")
        canon = self.ambient.sorted(self.elements)
        if canon != self.elements:
            object.__setattr__(self, "elements", canon)

    @classmethod
    def of(cls, ambient: FinObject, elements: Iterable) -> "Subobject":
        return cls(ambient, tuple(elements))

    @classmethod
    def full(cls, ambient: FinObject) -> "Subobject":
        return cls(ambient, ambient.elements)

    @classmethod
    def empty(cls, ambient: FinObject) -> "Subobject":
        return cls(ambient, ())

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    @cached_property
    def as_object(self) -> FinObject:
        if self.elements == self.ambient.elements:
            return self.ambient
        return FinObject(self.elements, self.ambient.arity)

    def inclusion(self, semiring: Semiring) -> Kernel:
        return fm.inclusion(self.as_object, self.ambient, semiring)

    def is_full(self) -> bool:
        return len(self.elements) == len(self.ambient)

    def __le__(self, other: "Subobject") -> bool:
        _same_ambient(self, other)
        return self.element_set <= other.element_set

    def __and__(self, other: "Subobject") -> "Subobject":
        _same_ambient(self, other)
        return Subobject(self.ambient, tuple(e for e in self.elements if e in other.element_set))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e):
        return e in self.element_set

    def __str__(self):
        return "{" + ", ".join(format_element(e) for e in self.elements) + "}"


def _same_ambient(a: Subobject, b: Subobject):
    if a.ambient != b.ambient:
        raise ShapeError(f"subobjects of different objects: {a.ambient} vs {b.ambient}")


def subobject_tensor(*subs: Subobject) -> Subobject:
    ambient = fm.tensor(*(s.ambient for s in subs))
    return Subobject(ambient, fm.tensor(*(s.as_object for s in subs)).elements)


class ParMap:
    """A partial kernel: domain subset ``dom`` of ``source`` and a kernel on it."""

    __slots__ = ("source", "target", "dom", "ker", "_hash")

    def __init__(self, source: FinObject, dom: Subobject, ker: Kernel):
        if dom.ambient != source:
            raise ShapeError("domain is not a subobject of the source")
        if ker.source != dom.as_object:
            raise ShapeError("kernel source differs from the domain")
        self.source = source
        self.target = ker.target
        self.dom = dom
        self.ker = ker
        self._hash = None

    @property
    def semiring(self) -> Semiring:
        return self.ker.semiring

    def __eq__(self, other):
        if not isinstance(other, ParMap):
            return NotImplemented
        return self.source == other.source and self.ker == other.ker

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.source, self.ker))
        return self._hash

    def __repr__(self):
        return f"ParMap(dom={self.dom}; {fm.format_kernel(self.ker)})"

    def __call__(self, x) -> dict:
        """The column at ``x``; empty when ``x`` is outside the domain."""
        return self.ker.columns.get(x, {})


def partial(source: FinObject, target: FinObject, semiring: Semiring, columns: dict) -> ParMap:
    """Build a ParMap from the columns given on its domain (validated)."""
    dom = Subobject.of(source, columns)
    return ParMap(source, dom, Kernel(dom.as_object, target, semiring, columns))


def _raw(source: FinObject, target: FinObject, semiring: Semiring, columns: dict) -> ParMap:
    dom = Subobject.of(source, columns)
    return ParMap(source, dom, Kernel(dom.as_object, target, semiring, columns, check=False))


def empty_map(source: FinObject, target: FinObject, semiring: Semiring) -> ParMap:
    return _raw(source, target, semiring, {})


def lift(f: Kernel) -> ParMap:
    return ParMap(f.source, Subobject.full(f.source), f)


def restrict_to(u: ParMap, sub: Subobject) -> ParMap:
    """``u ∘ (sub as a domain idempotent)``: forget ``u`` outside ``sub``."""
    if sub.ambient != u.source:
        raise ShapeError("restriction subobject lives on a different object")
    cols = {x: c for x, c in u.ker.columns.items() if x in sub.element_set}
    return _raw(u.source, u.target, u.semiring, cols)


def par_identity(x: FinObject, semiring: Semiring) -> ParMap:
    return lift(fm.identity(x, semiring))


def par_copy(x: FinObject, semiring: Semiring) -> ParMap:
    return lift(fm.copy(x, semiring))


def par_discard(x: FinObject, semiring: Semiring) -> ParMap:
    return lift(fm.discard(x, semiring))


def par_swap(x: FinObject, y: FinObject, semiring: Semiring) -> ParMap:
    return lift(fm.swap(x, y, semiring))


def pullback_det_mono(f: Kernel, t: Subobject) -> Subobject:
    """Pull the subset ``t`` of ``f.target`` back along ``f``.

    The result is ``{x : supp f(·|x) ⊆ t}``; ``f`` restricted to it lands in ``t``.
    """
    if t.ambient != f.target:
        raise ShapeError(f"subobject lives on {t.ambient}, kernel targets {f.target}")
    tset = t.element_set
    return Subobject(f.source, tuple(x for x, c in f.columns.items() if c.keys() <= tset))


def par_compose(v: ParMap, u: ParMap) -> ParMap:
    """``v ∘ u``: pull ``dom(v)`` back along ``u``, then Chapman–Kolmogorov."""
    if u.semiring != v.semiring:
        raise InstanceMismatch(f"{u.semiring.tag} map composed with {v.semiring.tag} map")
    if u.target != v.source:
        raise ShapeError(f"cannot compose: target {u.target} differs from source {v.source}")
    sr = u.semiring
    plus, times, zero = sr.plus, sr.times, sr.zero()
    vcols = v.ker.columns
    cols = {}
    for x, ux in u.ker.columns.items():
        if not ux.keys() <= vcols.keys():
            continue
        acc = {}
        for y, w in ux.items():
            for z, c in vcols[y].items():
                acc[z] = plus(acc.get(z, zero), times(c, w))
        cols[x] = {z: w for z, w in acc.items() if w != zero}
    return _raw(u.source, v.target, sr, cols)


def par_compose_all(*maps: ParMap) -> ParMap:
    """Diagram order: ``par_compose_all(u, v, w) = w ∘ v ∘ u``."""
    acc = maps[0]
    for m in maps[1:]:
        acc = par_compose(m, acc)
    return acc


def par_tensor(u: ParMap, v: ParMap) -> ParMap:
    ker = fm.kernel_tensor(u.ker, v.ker)
    source = fm.tensor(u.source, v.source)
    return ParMap(source, Subobject(source, ker.source.elements), ker)


def par_dom(u: ParMap) -> ParMap:
    """The span restriction idempotent ``(D, i, i)``."""
    return ParMap(u.source, u.dom, fm.inclusion(u.dom.as_object, u.source, u.semiring))


def cd_dom(u: ParMap) -> ParMap:
    """``(id ⊗ (discard ∘ u)) ∘ cop``, computed with Par operations only."""
    sr, x = u.semiring, u.source
    marker = par_compose(par_discard(u.target, sr), u)
    body = par_tensor(par_identity(x, sr), marker)
    return par_compose(body, par_copy(x, sr))


def is_total(u: ParMap) -> bool:
    return u.dom.is_full()


def is_total_by_equation(u: ParMap) -> bool:
    return par_compose(par_discard(u.target, u.semiring), u) == par_discard(u.source, u.semiring)


def is_copyable(u: ParMap) -> bool:
    return fm.is_deterministic(u.ker)


def is_copyable_by_equation(u: ParMap) -> bool:
    sr = u.semiring
    lhs = par_compose(par_copy(u.target, sr), u)
    rhs = par_compose(par_tensor(u, u), par_copy(u.source, sr))
    return lhs == rhs


def _parallel(u: ParMap, v: ParMap):
    if u.source != v.source or u.target != v.target:
        raise ShapeError("the two maps are not parallel")
    if u.semiring != v.semiring:
        raise InstanceMismatch("the two maps use different semirings")


def extends(u: ParMap, v: ParMap) -> bool:
    """``u ⊒ v``: ``v = u ∘ dom(v)`` with the CD-structure domain."""
    _parallel(u, v)
    return par_compose(u, cd_dom(v)) == v


def span_geq(u: ParMap, v: ParMap) -> bool:
    """Span order: ``dom(v) ⊆ dom(u)`` and ``u`` agrees with ``v`` there."""
    _parallel(u, v)
    ucols = u.ker.columns
    for x, col in v.ker.columns.items():
        if ucols.get(x) != col:
            return False
    return True
