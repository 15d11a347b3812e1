"""Finite carriers and total kernels: the Kleisli category of D_R on finite sets.

Elements of an object are tuples of atomic labels.  An atomic object holds
1-tuples, the unit ``I`` holds the single empty tuple, and tensoring
concatenates tuples, so associators and unitors are identities on the
representation.  Kernels are sparse: ``columns[x]`` maps each target element
``y`` with nonzero weight ``f(y|x)`` to that weight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Callable, Iterable, Sequence

from .semiring import InstanceMismatch, Semiring, require_shipped


class ShapeError(ValueError):
    """Objects or arities do not line up."""


class SetLabel(tuple):
    """A label that stands for a finite subset (used by distribution objects)."""

    __slots__ = ()

    def __repr__(self):
        return "{" + ", ".join(format_element(e) for e in self) + "}"

    __str__ = __repr__


def format_atom(a) -> str:
    if isinstance(a, SetLabel):
        return repr(a)
    if isinstance(a, tuple):
        return "(" + ", ".join(format_atom(x) for x in a) + ")"
    return str(a)


def format_element(e: tuple) -> str:
    if len(e) == 1:
        return format_atom(e[0])
    return "(" + ", ".join(format_atom(a) for a in e) + ")"


@dataclass(frozen=True)
class FinObject:
    elements: tuple
    arity: int
    factors: tuple | None = field(default=None, compare=False, repr=False)
    name: str | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ShapeError("object labels must be pairwise distinct")
        for e in self.elements:
            if not isinstance(e, tuple) or len(e) != self.arity:
                raise ShapeError(f"element {e!r} does not have arity {self.arity}")

    @cached_property
    def index(self) -> dict:
        return {e: i for i, e in enumerate(self.elements)}

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e):
        return e in self.index

    def sorted(self, elements: Iterable) -> tuple:
        idx = self.index
        return tuple(sorted(set(elements), key=idx.__getitem__))

    def subset(self, elements: Iterable) -> "FinObject":
        els = list(elements)
        missing = [e for e in els if e not in self.index]
        if missing:
            raise ShapeError(f"{format_element(missing[0])} is not an element of {self}")
        return FinObject(self.sorted(els), self.arity)

    def coordinate(self, k: int) -> "FinObject":
        """The atomic object carried by coordinate ``k``."""
        if not 0 <= k < self.arity:
            raise ShapeError(f"coordinate {k} out of range for arity {self.arity}")
        if self.factors is not None:
            return self.factors[k]
        seen = dict.fromkeys(e[k] for e in self.elements)
        return FinObject(tuple((a,) for a in seen), 1)

    def __str__(self):
        if self.name:
            return self.name
        return "{" + ", ".join(format_element(e) for e in self.elements) + "}"


def obj(*labels, name: str | None = None) -> FinObject:
    """Atomic object with the given labels, in the given order."""
    o = FinObject(tuple((a,) for a in labels), 1, name=name)
    object.__setattr__(o, "factors", (o,))
    return o


UNIT = FinObject(((),), 0, factors=(), name="I")


def tensor(*objects: FinObject) -> FinObject:
    if not objects:
        return UNIT
    if len(objects) == 1:
        return objects[0]
    elements = tuple(
        tuple(itertools.chain.from_iterable(parts))
        for parts in itertools.product(*(o.elements for o in objects))
    )
    arity = sum(o.arity for o in objects)
    if all(o.factors is not None for o in objects):
        factors = tuple(itertools.chain.from_iterable(o.factors for o in objects))
    else:
        factors = None
    names = [o.name for o in objects if o.arity]
    name = " ⊗ ".join(names) if all(o.name for o in objects) and names else None
    return FinObject(elements, arity, factors=factors, name=name)


def power(x: FinObject, n: int) -> FinObject:
    return tensor(*([x] * n)) if n else UNIT


class Kernel:
    """A total kernel ``source -> target`` with weights in one semiring."""

    __slots__ = ("source", "target", "semiring", "columns", "_hash")

    def __init__(self, source: FinObject, target: FinObject, semiring: Semiring, columns, check: bool = True):
        self.source = source
        self.target = target
        self.semiring = semiring
        self._hash = None
        if check:
            require_shipped(semiring)
            cols = {}
            for x, col in columns.items():
                if x not in source.index:
                    raise ShapeError(f"{format_element(x)} is not in the source {source}")
                clean = {}
                for y, w in col.items():
                    if y not in target.index:
                        raise ShapeError(f"{format_element(y)} is not in the target {target}")
                    w = semiring.coerce(w)
                    if not semiring.is_zero(w):
                        clean[y] = w
                cols[x] = clean
            for x in source.elements:
                col = cols.get(x)
                if col is None:
                    raise ShapeError(f"no column given for source element {format_element(x)}")
                if semiring.total(col.values()) != semiring.one():
                    raise ShapeError(
                        f"column {format_element(x)} is not normalized "
                        f"(sums to {semiring.format(semiring.total(col.values()))})"
                    )
            columns = cols
        self.columns = columns

    def __getitem__(self, x) -> dict:
        return self.columns[x]

    def weight(self, y, x):
        return self.columns[x].get(y, self.semiring.zero())

    def support(self, x) -> frozenset:
        return frozenset(self.columns[x])

    def __eq__(self, other):
        if not isinstance(other, Kernel):
            return NotImplemented
        return (
            self.semiring == other.semiring
            and self.source == other.source
            and self.target == other.target
            and self.columns == other.columns
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (self.semiring, self.source, self.target,
                 frozenset((x, frozenset(c.items())) for x, c in self.columns.items()))
            )
        return self._hash

    def __repr__(self):
        return f"Kernel({format_kernel(self)})"

    @property
    def shape(self):
        return self.source, self.target

    def sorted_column(self, x):
        idx = self.target.index
        return sorted(self.columns[x].items(), key=lambda kv: idx[kv[0]])


def format_kernel(f: Kernel) -> str:
    sr = f.semiring
    parts = []
    for x in f.source.elements:
        body = ", ".join(f"{format_element(y)}:{sr.format(w)}" for y, w in f.sorted_column(x))
        parts.append(f"{format_element(x)}↦{{{body}}}")
    return "[" + ", ".join(parts) + "]"


def _check_same(*kernels: Kernel) -> Semiring:
    sr = kernels[0].semiring
    for k in kernels[1:]:
        if k.semiring != sr:
            raise InstanceMismatch(f"{sr.tag} kernel combined with {k.semiring.tag} kernel")
    return sr


def from_function(source: FinObject, target: FinObject, fn: Callable, semiring: Semiring) -> Kernel:
    """Deterministic kernel ``x ↦ δ_fn(x)``."""
    one = semiring.one()
    return Kernel(source, target, semiring, {x: {fn(x): one} for x in source.elements})


def _dirac(source, target, fn, semiring) -> Kernel:
    one = semiring.one()
    return Kernel(source, target, semiring, {x: {fn(x): one} for x in source.elements}, check=False)


def identity(x: FinObject, semiring: Semiring) -> Kernel:
    return _dirac(x, x, lambda e: e, semiring)


def copy(x: FinObject, semiring: Semiring) -> Kernel:
    return _dirac(x, tensor(x, x), lambda e: e + e, semiring)


def discard(x: FinObject, semiring: Semiring) -> Kernel:
    return _dirac(x, UNIT, lambda e: (), semiring)


def swap(x: FinObject, y: FinObject, semiring: Semiring) -> Kernel:
    n = x.arity
    return _dirac(tensor(x, y), tensor(y, x), lambda e: e[n:] + e[:n], semiring)


def copies(x: FinObject, n: int, semiring: Semiring) -> Kernel:
    """The ``n``-output iterated copy ``x ↦ δ(x, ..., x)``; n = 0 gives discard."""
    return _dirac(x, power(x, n), lambda e: e * n, semiring)


def compose(g: Kernel, f: Kernel) -> Kernel:
    """``g ∘ f`` by the Chapman–Kolmogorov sum."""
    sr = _check_same(f, g)
    if f.target != g.source:
        raise ShapeError(f"cannot compose: target {f.target} of f differs from source {g.source} of g")
    plus, times, zero = sr.plus, sr.times, sr.zero()
    gcols = g.columns
    cols = {}
    for x, fx in f.columns.items():
        acc = {}
        for y, w in fx.items():
            for z, v in gcols[y].items():
                acc[z] = plus(acc.get(z, zero), times(v, w))
        cols[x] = {z: w for z, w in acc.items() if w != zero}
    return Kernel(f.source, g.target, sr, cols, check=False)


def compose_all(*kernels: Kernel) -> Kernel:
    """Compose in diagram order: ``compose_all(f, g, h) = h ∘ g ∘ f``."""
    return reduce(lambda acc, k: compose(k, acc), kernels[1:], kernels[0])


def kernel_tensor(f: Kernel, g: Kernel) -> Kernel:
    sr = _check_same(f, g)
    times = sr.times
    cols = {}
    for x1, c1 in f.columns.items():
        for x2, c2 in g.columns.items():
            cols[x1 + x2] = {y1 + y2: times(w1, w2) for y1, w1 in c1.items() for y2, w2 in c2.items()}
    return Kernel(tensor(f.source, g.source), tensor(f.target, g.target), sr, cols, check=False)


def tensor_all(kernels: Sequence[Kernel], semiring: Semiring | None = None) -> Kernel:
    if not kernels:
        if semiring is None:
            raise ShapeError("empty kernel family needs an explicit semiring")
        return identity(UNIT, semiring)
    return reduce(kernel_tensor, kernels)


def restrict(f: Kernel, sub: FinObject) -> Kernel:
    """``f`` precomposed with the inclusion of ``sub`` into its source."""
    if sub.arity != f.source.arity or not sub.element_set <= f.source.element_set:
        raise ShapeError(f"{sub} is not a subset of {f.source}")
    return Kernel(sub, f.target, f.semiring, {x: f.columns[x] for x in sub.elements}, check=False)


def corestrict(f: Kernel, sub: FinObject) -> Kernel:
    """``f`` viewed as a kernel into ``sub``; every column must be supported in it."""
    for x, col in f.columns.items():
        if not col.keys() <= sub.element_set:
            raise ShapeError(f"column {format_element(x)} is not supported in {sub}")
    return Kernel(f.source, sub, f.semiring, f.columns, check=False)


def inclusion(sub: FinObject, ambient: FinObject, semiring: Semiring) -> Kernel:
    if sub.arity != ambient.arity or not sub.element_set <= ambient.element_set:
        raise ShapeError(f"{sub} is not a subset of {ambient}")
    return _dirac(sub, ambient, lambda e: e, semiring)


def projection(x: FinObject, positions: Sequence[int], semiring: Semiring) -> Kernel:
    """Deterministic marginalization onto the given coordinates, in the given order."""
    positions = list(positions)
    for p in positions:
        if not 0 <= p < x.arity:
            raise ShapeError(f"invalid factor index {p} for an object of arity {x.arity}")
    target = tensor(*(x.coordinate(p) for p in positions))
    return _dirac(x, target, lambda e: tuple(e[p] for p in positions), semiring)


def marginal(f: Kernel, output_factor_indices: Sequence[int]) -> Kernel:
    """Post-compose with discards on the unselected output coordinates."""
    idx = list(output_factor_indices)
    if len(set(idx)) != len(idx):
        raise ShapeError("factor indices must be distinct")
    return compose(projection(f.target, idx, f.semiring), f)


def is_deterministic(f: Kernel) -> bool:
    """Decide ``cop ∘ f = (f ⊗ f) ∘ cop``."""
    sr = f.semiring
    return compose(copy(f.target, sr), f) == compose(kernel_tensor(f, f), copy(f.source, sr))


def is_dirac(f: Kernel) -> bool:
    one = f.semiring.one()
    return all(len(c) == 1 and next(iter(c.values())) == one for c in f.columns.values())
