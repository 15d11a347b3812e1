"""Distribution objects for the finitely representable instances.

For ``bool`` the distribution object ``PX`` is the set of nonempty subsets of
``X`` (labels are :class:`SetLabel` tuples in ``X``'s order, enumerated by
bitmask); ``δ`` is the singleton, ``samp`` relates a subset to each of its
members and ``μ`` is union.  For ``nat`` every kernel is a function, so
``PX = X`` and all the structure maps are identities.  ``qnonneg`` has an
infinite ``PX`` and is rejected.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache

from . import finmarkov as fm
from . import parkernel as pk
from .finmarkov import FinObject, Kernel, SetLabel, ShapeError, format_element
from .parkernel import ParMap, Subobject
from .pullbacks import PullbackVerdict, is_pullback
from .semiring import Semiring, UnsupportedInstance


def _require(sr: Semiring):
    if sr.tag not in ("bool", "nat"):
        raise UnsupportedInstance(f"distribution objects unsupported for {sr.tag}: PX is infinite")


@dataclass(frozen=True)
class DistObject:
    base: FinObject
    carrier: FinObject
    semiring: Semiring

    def encode(self, support) -> tuple:
        """Carrier element of the distribution supported on ``support``."""
        if self.semiring.tag == "nat":
            (x,) = support
            return x
        label = SetLabel(self.base.sorted(support))
        if not label:
            raise ShapeError("distributions are nonempty")
        return (label,)

    def decode(self, element) -> frozenset:
        if self.semiring.tag == "nat":
            return frozenset([element])
        return frozenset(element[0])


@lru_cache(maxsize=64)
def dist_object(x: FinObject, sr: Semiring) -> DistObject:
    _require(sr)
    if sr.tag == "nat":
        return DistObject(x, x, sr)
    els = x.elements
    labels = []
    for mask in range(1, 1 << len(els)):
        labels.append((SetLabel(e for b, e in enumerate(els) if mask >> b & 1),))
    carrier = FinObject(tuple(labels), 1, name=f"P({x.name})" if x.name else None)
    object.__setattr__(carrier, "factors", (carrier,))
    return DistObject(x, carrier, sr)


def delta(x: FinObject, sr: Semiring) -> Kernel:
    p = dist_object(x, sr)
    return fm._dirac(x, p.carrier, lambda e: p.encode([e]), sr)


def samp(x: FinObject, sr: Semiring) -> Kernel:
    p = dist_object(x, sr)
    one = sr.one()
    cols = {s: {e: one for e in p.decode(s)} for s in p.carrier.elements}
    return Kernel(p.carrier, x, sr, cols, check=False)


def push_kernel(f: Kernel) -> Kernel:
    """``P f = (f ∘ samp)♯``: a subset goes to the union of the supports of its members."""
    sr = f.semiring
    px, py = dist_object(f.source, sr), dist_object(f.target, sr)

    def image(s):
        out = set()
        for e in px.decode(s):
            out |= f.columns[e].keys()
        return py.encode(out)

    return fm._dirac(px.carrier, py.carrier, image, sr)


def mu(x: FinObject, sr: Semiring) -> Kernel:
    """``PPX → PX``; for ``bool`` a set of subsets goes to their union."""
    return push_kernel(samp(x, sr))


def sharp(u: ParMap) -> ParMap:
    """Copyable counterpart ``(dom u; x ↦ δ_{u(·|x)})`` into the distribution object."""
    sr = u.semiring
    py = dist_object(u.target, sr)
    ker = fm._dirac(u.dom.as_object, py.carrier, lambda e: py.encode(u.ker.columns[e]), sr)
    return ParMap(u.source, u.dom, ker)


def pushforward(u: ParMap) -> ParMap:
    """``(P dom(u); P i; P ker(u))``: defined on the subsets inside ``dom(u)``."""
    sr = u.semiring
    px = dist_object(u.source, sr)
    pd = dist_object(u.dom.as_object, sr)
    pk_ = push_kernel(u.ker)
    dom = Subobject.of(px.carrier, pd.carrier.elements)
    ker = Kernel(dom.as_object, pk_.target, sr, {s: pk_.columns[s] for s in dom.elements}, check=False)
    return ParMap(px.carrier, dom, ker)


def pushforward_via_adjunction(u: ParMap) -> ParMap:
    """``P u`` traced through the hom-bijection: ``(u ∘ samp)♯``."""
    return sharp(pk.par_compose(u, pk.lift(samp(u.source, u.semiring))))


def samp_pullback_check(i: Subobject, sr: Semiring, probe_size: int = 1) -> PullbackVerdict:
    """Universality of the naturality square ``(PA, samp, P i, i)``."""
    _require(sr)
    a = i.as_object
    inc = i.inclusion(sr)
    return is_pullback(
        top=samp(a, sr), left=push_kernel(inc), right=inc, bottom=samp(i.ambient, sr), probe_size=probe_size
    )


@dataclass(frozen=True)
class PartialAlgebraCandidate:
    carrier: FinObject
    dom: Subobject
    action: Kernel


@dataclass
class ConditionResult:
    condition: str
    passed: bool
    witness: object = None
    detail: str = ""


@dataclass
class AlgebraReport:
    results: list[ConditionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name):
        for r in self.results:
            if r.condition == name:
                return r
        raise KeyError(name)


def _unit_condition(c, pa, sr) -> ConditionResult:
    for a in c.carrier.elements:
        d = pa.encode([a])
        if d not in c.dom.element_set:
            return ConditionResult("unit", False, a, f"δ({format_element(a)}) is outside the domain")
        if c.action.columns[d] != {a: sr.one()}:
            return ConditionResult("unit", False, a, f"a(δ({format_element(a)})) ≠ {format_element(a)}")
    return ConditionResult("unit", True)


def check_partial_algebra(c: PartialAlgebraCandidate) -> AlgebraReport:
    """Check the unit, multiplication-domain and commutation conditions of a partial algebra."""
    sr = c.action.semiring
    _require(sr)
    pa = dist_object(c.carrier, sr)
    if c.dom.ambient != pa.carrier:
        raise ShapeError("algebra domain must be a subobject of the distribution object of the carrier")
    if c.action.source != c.dom.as_object or c.action.target != c.carrier:
        raise ShapeError("algebra action must go from the domain to the carrier")
    if not fm.is_deterministic(c.action):
        raise ShapeError("algebra action must be deterministic")

    report = AlgebraReport([_unit_condition(c, pa, sr)])
    act = {d: next(iter(col)) for d, col in c.action.columns.items()}
    mult = mu(c.carrier, sr)
    ppa = dist_object(pa.carrier, sr)
    dset = c.dom.element_set

    via_mu, via_action = set(), set()
    for big in ppa.carrier.elements:
        if next(iter(mult.columns[big])) in dset:
            via_mu.add(big)
        members = ppa.decode(big)
        if members <= dset and pa.encode(act[m] for m in members) in dset:
            via_action.add(big)
    diff = sorted(via_mu ^ via_action, key=ppa.carrier.index.__getitem__)
    if diff:
        w = diff[0]
        side = "μ" if w in via_mu else "P a"
        report.results.append(ConditionResult(
            "multiplication_domain", False, w, f"{format_element(w)} lies only in the pullback along {side}"))
    else:
        report.results.append(ConditionResult("multiplication_domain", True))

    for big in ppa.carrier.elements:
        if big not in via_mu or big not in via_action:
            continue
        lhs = act[next(iter(mult.columns[big]))]
        rhs = act[pa.encode(act[m] for m in ppa.decode(big))]
        if lhs != rhs:
            report.results.append(ConditionResult(
                "commutation", False, big,
                f"a(μ π) = {format_element(lhs)} but a(P a π) = {format_element(rhs)} at π = {format_element(big)}"))
            break
    else:
        report.results.append(ConditionResult("commutation", True))
    return report


def _nested(level: int, sr, base: FinObject):
    obj_ = base
    for _ in range(level):
        obj_ = dist_object(obj_, sr).carrier
    return obj_


def monad_law_report(x: FinObject, sr: Semiring, seed: int = 0, samples: int = 2000) -> dict:
    """Unit and associativity laws of ``(P, μ, δ)`` at ``x``.

    The unit laws are checked on whole kernels.  Associativity lives on
    ``P³X``, which is materialized only when ``|P²X| ≤ 7``; beyond that it is
    checked on every element of ``P³X`` with at most two members when
    ``|P²X| ≤ 127``, and on ``samples`` random elements of size ≤ 3 otherwise.
    """
    _require(sr)
    px = dist_object(x, sr).carrier
    ppx = dist_object(px, sr).carrier
    ident = fm.identity(px, sr)
    out = {
        "left_unit": fm.compose(mu(x, sr), delta(px, sr)) == ident,
        "right_unit": fm.compose(mu(x, sr), push_kernel(delta(x, sr))) == ident,
        "samp_delta": fm.compose(samp(x, sr), delta(x, sr)) == fm.identity(x, sr),
    }
    if sr.tag == "nat" or len(ppx) <= 7:
        lhs = fm.compose(mu(x, sr), push_kernel(mu(x, sr)))
        rhs = fm.compose(mu(x, sr), mu(px, sr))
        out["associativity"] = lhs == rhs
        return out

    px_dist, pdist = dist_object(x, sr), dist_object(px, sr)
    mult = mu(x, sr)
    mu_x = {m: next(iter(mult.columns[m])) for m in ppx.elements}

    def both_sides(members):
        # members: elements of P²X making up one element of P³X
        lhs = px_dist.encode(frozenset().union(*(px_dist.decode(mu_x[m]) for m in members)))
        flat = pdist.encode(frozenset().union(*(pdist.decode(m) for m in members)))
        return lhs, mu_x[flat]

    if len(ppx) <= 127:
        families = itertools.chain(((m,) for m in ppx.elements), itertools.combinations(ppx.elements, 2))
    else:
        rng = random.Random(seed)
        families = (tuple(rng.sample(ppx.elements, rng.randint(1, 3))) for _ in range(samples))
    out["associativity"] = all(l == r for l, r in map(both_sides, families))
    return out


def hom_bijection_check(x: FinObject, y: FinObject, sr: Semiring) -> bool:
    """``sharp`` and ``samp ∘ (−)`` are mutually inverse on the full hom-sets."""
    from .enumeration import all_parmaps

    s = pk.lift(samp(y, sr))
    py = dist_object(y, sr).carrier
    for u in all_parmaps(x, y, sr):
        su = sharp(u)
        if not pk.is_copyable(su) or pk.par_compose(s, su) != u:
            return False
    for g in all_parmaps(x, py, sr, copyable_only=True):
        if sharp(pk.par_compose(s, g)) != g:
            return False
    return True
