"""Finite-index tensor families, lax cones and infinite copies.

Index sets are finite and ordered, so the limit vertex ``X^K`` is itself a
node of the diagram of finite marginals and the lax-universal map out of a
cone is its ``K``-leg restricted to the meet of all leg domains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import finmarkov as fm
from . import parkernel as pk
from .finmarkov import FinObject, ShapeError
from .parkernel import ParMap, Subobject
from .semiring import Semiring


class NotALaxCone(ValueError):
    pass


def tensor_family(maps: Sequence[ParMap], semiring: Semiring | None = None) -> ParMap:
    """Componentwise tensor: domain ``⊗ dom_k``, kernel ``⊗ ker_k``."""
    if not maps:
        if semiring is None:
            raise ShapeError("empty family needs an explicit semiring")
        return pk.par_identity(fm.UNIT, semiring)
    kers = [m.ker for m in maps]
    ker = fm.tensor_all(kers)
    source = fm.tensor(*(m.source for m in maps))
    return ParMap(source, Subobject(source, ker.source.elements), ker)


def power_family(objects: Sequence[FinObject], subset: Sequence[int]) -> FinObject:
    return fm.tensor(*(objects[k] for k in subset))


def _offsets(objects: Sequence[FinObject]) -> list[int]:
    return list(itertools.accumulate((o.arity for o in objects), initial=0))


def marginalization(objects: Sequence[FinObject], big: Sequence[int], small: Sequence[int], sr: Semiring) -> ParMap:
    """``π_{F,G} : X^F → X^G`` for index subsets ``G ⊆ F`` (both in index order)."""
    if not set(small) <= set(big):
        raise ShapeError(f"{sorted(small)} is not a subset of {sorted(big)}")
    src = power_family(objects, big)
    positions, pos = [], 0
    starts = {}
    for k in big:
        starts[k] = pos
        pos += objects[k].arity
    for k in small:
        positions.extend(range(starts[k], starts[k] + objects[k].arity))
    proj = fm._dirac(src, power_family(objects, small), lambda e: tuple(e[p] for p in positions), sr)
    return pk.lift(proj)


def subsets(k: int):
    for r in range(k + 1):
        yield from itertools.combinations(range(k), r)


@dataclass
class LaxCone:
    """Legs ``A → X^F`` keyed by index subsets (tuples of indices in order).

    A missing leg ``G`` is synthesized from the marginals of the supplied
    legs above it: their join when they agree wherever two are defined, and
    otherwise the marginal with the largest domain.  :func:`is_lax_cone`
    then validates every pair, so a synthesized leg is checked like any other.
    """

    apex: FinObject
    objects: list
    legs: dict = field(default_factory=dict)
    semiring: Semiring | None = None

    def __post_init__(self):
        self.legs = {tuple(sorted(k)): v for k, v in self.legs.items()}
        n = len(self.objects)
        for key, leg in self.legs.items():
            if any(not 0 <= i < n for i in key):
                raise ShapeError(f"leg index set {key} is outside 0..{n - 1}")
            if leg.source != self.apex or leg.target != power_family(self.objects, key):
                raise ShapeError(f"leg {key} has the wrong shape")
        if self.semiring is None:
            if not self.legs:
                raise ShapeError("a cone without legs needs an explicit semiring")
            self.semiring = next(iter(self.legs.values())).semiring

    @property
    def index(self) -> tuple:
        return tuple(range(len(self.objects)))

    def leg(self, key) -> ParMap:
        key = tuple(sorted(key))
        if key in self.legs:
            return self.legs[key]
        above = [f for f in self.legs if set(key) <= set(f)]
        if not above:
            raise ShapeError(f"no supplied leg covers the index set {key}")
        marginals = [
            pk.par_compose(marginalization(self.objects, f, key, self.semiring), self.legs[f])
            for f in sorted(above, key=len, reverse=True)
        ]
        cols = {}
        for m in marginals:
            for x, col in m.ker.columns.items():
                if cols.setdefault(x, col) != col:
                    return max(marginals, key=lambda m: len(m.dom))
        return pk._raw(self.apex, marginals[0].target, self.semiring, cols)

    def all_legs(self) -> dict:
        return {f: self.leg(f) for f in subsets(len(self.objects))}


def is_lax_cone(c: LaxCone) -> tuple[bool, tuple | None]:
    """``π_{F,G} ∘ leg_F ⊑ leg_G`` for all ``G ⊆ F``; returns the first violating pair."""
    legs = c.all_legs()
    for big in legs:
        for small in legs:
            if not set(small) <= set(big):
                continue
            projected = pk.par_compose(marginalization(c.objects, big, small, c.semiring), legs[big])
            if not pk.span_geq(legs[small], projected):
                return False, (big, small)
    return True, None


def is_strict_cone(c: LaxCone) -> bool:
    legs = c.all_legs()
    return all(
        pk.par_compose(marginalization(c.objects, big, small, c.semiring), legs[big]) == legs[small]
        for big in legs for small in legs if set(small) <= set(big)
    )


def subobject_meet(subs: Sequence[Subobject], ambient: FinObject | None = None) -> Subobject:
    """Greatest lower bound in the subobject poset: the intersection."""
    if not subs:
        if ambient is None:
            raise ShapeError("empty meet needs the ambient object")
        return Subobject.full(ambient)
    out = subs[0]
    for s in subs[1:]:
        out = out & s
    return out


def subobject_meet_by_pullback(subs: Sequence[Subobject], semiring: Semiring) -> Subobject:
    """Meet as the pullback of ``⊗ i_k`` along the iterated copy ``B → B^K``."""
    ambient = subs[0].ambient
    box = pk.subobject_tensor(*subs)
    return pk.pullback_det_mono(fm.copies(ambient, len(subs), semiring), box)


def lax_induced_map(c: LaxCone) -> ParMap:
    """Greatest ``g`` with ``π_F ∘ g ⊑ leg_F``: the ``K``-leg on the meet of all leg domains."""
    ok, witness = is_lax_cone(c)
    if not ok:
        raise NotALaxCone(f"legs {witness[0]} → {witness[1]} do not commute laxly")
    legs = c.all_legs()
    full = c.index
    if full not in c.legs:
        raise ShapeError("the cone must supply its leg into X^K")
    meet = subobject_meet([leg.dom for leg in legs.values()], c.apex)
    return pk.restrict_to(c.legs[full], meet)


def factors_through(c: LaxCone, h: ParMap) -> bool:
    """``π_F ∘ h ⊑ leg_F`` for every index subset ``F``."""
    full = c.index
    return all(
        pk.span_geq(leg, pk.par_compose(marginalization(c.objects, full, f, c.semiring), h))
        for f, leg in c.all_legs().items()
    )


def infinite_copy(u: ParMap, k: int | Sequence) -> ParMap:
    """``(dom u; x ↦ K-fold independent product of u(·|x))``.

    ``k`` is the size of the index set or the index set itself.  The empty
    index set gives ``discard ∘ u``.
    """
    n = k if isinstance(k, int) else len(k)
    if n < 0:
        raise ShapeError("index set size must be nonnegative")
    sr = u.semiring
    if n == 0:
        return pk.par_compose(pk.par_discard(u.target, sr), u)
    cols = {}
    for x, col in u.ker.columns.items():
        acc = {(): sr.one()}
        for _ in range(n):
            acc = {ys + y: sr.times(w, v) for ys, w in acc.items() for y, v in col.items()}
        cols[x] = acc
    ker = fm.Kernel(u.dom.as_object, fm.power(u.target, n), sr, cols, check=False)
    return ParMap(u.source, u.dom, ker)


def copy_power(u: ParMap, n: int) -> ParMap:
    """``u^(F)`` for ``|F| = n``: iterated copy followed by ``n`` tensored copies of ``u``."""
    sr = u.semiring
    if n == 0:
        return pk.par_compose(pk.par_discard(u.target, sr), u)
    return pk.par_compose(tensor_family([u] * n), pk.lift(fm.copies(u.source, n, sr)))


def box_subobject(subs: Sequence[Subobject], chosen: Sequence[int]) -> Subobject:
    """``j_F^K``: ``A_k`` on the chosen indices and the whole ``X_k`` elsewhere."""
    chosen = set(chosen)
    parts = [s if k in chosen else Subobject.full(s.ambient) for k, s in enumerate(subs)]
    return pk.subobject_tensor(*parts)


def box_cutout_check(subs: Sequence[Subobject]) -> bool:
    """The meet of all boxes ``j_F^K`` is ``⊗ A_k``, and it is the greatest lower bound.

    The second half enumerates every subset ``C`` of ``X^K`` and checks that
    ``C`` lies below all boxes exactly when it lies below ``⊗ A_k``.
    """
    from .enumeration import all_subobjects

    n = len(subs)
    boxes = [box_subobject(subs, f) for f in subsets(n)]
    product = pk.subobject_tensor(*subs)
    if subobject_meet(boxes) != product:
        return False
    return all(
        all(c <= b for b in boxes) == (c <= product)
        for c in all_subobjects(product.ambient)
    )


def marginal_fibre_square(subs: Sequence[Subobject], chosen: Sequence[int], sr: Semiring):
    """The square ``(B_F, p_F, j_F^K, π_F, i^F)`` as four kernels (top, left, right, bottom)."""
    objects = [s.ambient for s in subs]
    chosen = sorted(chosen)
    box = box_subobject(subs, chosen)
    pi_f = marginalization(objects, range(len(subs)), chosen, sr).ker
    a_f = pk.subobject_tensor(*(subs[k] for k in chosen))
    top = fm.corestrict(fm.restrict(pi_f, box.as_object), a_f.as_object)
    return top, box.inclusion(sr), a_f.inclusion(sr), pi_f
