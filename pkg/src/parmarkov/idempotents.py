"""Idempotent partial kernels: decomposition, splitting and classification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import SimpleNamespace

from . import finmarkov as fm
from . import parkernel as pk
from .finmarkov import FinObject, Kernel, ShapeError
from .parkernel import ParMap


class NotIdempotent(ValueError):
    pass


class SplitFailure(RuntimeError):
    """A constructed splitting candidate failed exact verification."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Splitting:
    through: FinObject
    retraction: ParMap
    section: ParMap


@dataclass(frozen=True)
class IdempotentFlags:
    balanced: bool
    static: bool
    strong: bool


def _require_endo(u: ParMap):
    if u.source != u.target:
        raise ShapeError("idempotents must be endomorphisms")


def is_idempotent(u: ParMap) -> bool:
    _require_endo(u)
    return pk.par_compose(u, u) == u


def on_domain_idempotent(u: ParMap) -> Kernel:
    """The idempotent ``e`` on ``D = dom(u)`` with ``u = (D, i, i ∘ e)``."""
    if not is_idempotent(u):
        raise NotIdempotent("map is not idempotent")
    d = u.dom.as_object
    try:
        e = fm.corestrict(u.ker, d)
    except ShapeError as exc:
        raise RuntimeError(f"idempotent escapes its domain: {exc}") from exc
    if fm.compose(e, e) != e:
        raise RuntimeError("on-domain kernel is not idempotent")
    return e


def _masks(e: Kernel):
    idx = e.target.index
    return [sum(1 << idx[y] for y in e.columns[x]) for x in e.source.elements]


def _subsets(mask: int, singletons_only: bool):
    bits = [b for b in range(mask.bit_length()) if mask >> b & 1]
    if singletons_only:
        return [1 << b for b in bits]
    out = []
    for r in range(1, len(bits) + 1):
        for combo in itertools.combinations(bits, r):
            out.append(sum(1 << b for b in combo))
    return out


def _split_search(e: Kernel):
    """Exhaustive search over split objects of size ≤ |D| (bool and nat)."""
    n = len(e.source)
    em = _masks(e)
    singletons = e.semiring.tag == "nat"
    for k in range(0 if n == 0 else 1, n + 1):
        r_choices = _subsets((1 << k) - 1, singletons)
        for r in itertools.product(r_choices, repeat=n):
            blocks = [sum(1 << d for d in range(n) if r[d] == 1 << c) for c in range(k)]
            if not all(blocks):
                continue
            for s in itertools.product(*(_subsets(b, singletons) for b in blocks)):
                ok = True
                for d in range(n):
                    acc = 0
                    for c in range(k):
                        if r[d] >> c & 1:
                            acc |= s[c]
                    if acc != em[d]:
                        ok = False
                        break
                if ok:
                    return k, r, s
    return None


def _from_masks(source: FinObject, target: FinObject, masks, sr) -> Kernel:
    one = sr.one()
    cols = {}
    for x, m in zip(source.elements, masks):
        cols[x] = {target.elements[b]: one for b in range(len(target)) if m >> b & 1}
    return Kernel(source, target, sr, cols, check=False)


def _split_rational(e: Kernel):
    """Recurrent rows of ``e`` grouped by support give sections; class masses give the retraction."""
    sr = e.semiring
    classes: list[tuple[frozenset, dict]] = []
    for x in e.source.elements:
        col = e.columns[x]
        if x not in col:
            continue
        supp = frozenset(col)
        for s, row in classes:
            if s == supp:
                if row != col:
                    raise SplitFailure("recurrent rows with equal support differ", witness=x)
                break
        else:
            classes.append((supp, dict(col)))
    split_obj = fm.obj(*range(len(classes)), name="S")
    s_cols = {(c,): row for c, (_, row) in enumerate(classes)}
    r_cols = {}
    for d in e.source.elements:
        col = e.columns[d]
        masses = {}
        for c, (supp, _) in enumerate(classes):
            m = sr.total(col[y] for y in supp if y in col)
            if m != sr.zero():
                masses[(c,)] = m
        r_cols[d] = masses
    s = Kernel(split_obj, e.source, sr, s_cols, check=False)
    r = Kernel(e.source, split_obj, sr, r_cols, check=False)
    return split_obj, s, r


def split_base(e: Kernel) -> tuple[FinObject, Kernel, Kernel]:
    """Split an idempotent kernel ``e = s ∘ r`` with ``r ∘ s = id``; verified exactly."""
    sr = e.semiring
    if sr.tag == "qnonneg":
        split_obj, s, r = _split_rational(e)
    else:
        found = _split_search(e)
        if found is None:
            raise SplitFailure("no splitting through an object of size ≤ |D|")
        k, r_masks, s_masks = found
        split_obj = fm.obj(*range(k), name="S")
        r = _from_masks(e.source, split_obj, r_masks, sr)
        s = _from_masks(split_obj, e.source, s_masks, sr)
    try:
        fm.Kernel(r.source, r.target, sr, r.columns)
        fm.Kernel(s.source, s.target, sr, s.columns)
    except ShapeError as exc:
        raise SplitFailure(f"candidate is not a pair of kernels: {exc}") from exc
    if fm.compose(r, s) != fm.identity(split_obj, sr):
        raise SplitFailure("r ∘ s is not the identity", witness=fm.compose(r, s))
    if fm.compose(s, r) != e:
        raise SplitFailure("s ∘ r does not reproduce e", witness=fm.compose(s, r))
    return split_obj, s, r


def split_idempotent(u: ParMap) -> Splitting:
    """Split ``u`` via a splitting of its on-domain idempotent; both identities re-checked."""
    e = on_domain_idempotent(u)
    sr = u.semiring
    split_obj, s, r = split_base(e)
    section = pk.lift(fm.compose(u.dom.inclusion(sr), s))
    retraction = ParMap(u.source, u.dom, r)
    if pk.par_compose(retraction, section) != pk.par_identity(split_obj, sr):
        raise SplitFailure("r ∘ s is not the identity in Par")
    if pk.par_compose(section, retraction) != u:
        raise SplitFailure("s ∘ r does not reproduce the idempotent in Par")
    return Splitting(split_obj, retraction, section)


_PAR = SimpleNamespace(
    compose=pk.par_compose, tensor=pk.par_tensor, copy=pk.par_copy, identity=pk.par_identity,
    obj=lambda m: m.source,
)
_BASE = SimpleNamespace(
    compose=fm.compose, tensor=fm.kernel_tensor, copy=fm.copy, identity=fm.identity,
    obj=lambda m: m.source,
)


def _flags(m, cat) -> IdempotentFlags:
    x, sr = cat.obj(m), m.semiring
    ident, cop = cat.identity(x, sr), cat.copy(x, sr)
    copied = cat.compose(cop, m)
    lhs = cat.compose(cat.tensor(m, ident), copied)
    return IdempotentFlags(
        balanced=lhs == cat.compose(cat.tensor(ident, m), copied),
        static=lhs == copied,
        strong=lhs == cat.compose(cat.tensor(m, m), cop),
    )


def base_flags(e: Kernel) -> IdempotentFlags:
    if e.source != e.target or fm.compose(e, e) != e:
        raise NotIdempotent("kernel is not an idempotent endomorphism")
    return _flags(e, _BASE)


def classify_idempotent(u: ParMap) -> IdempotentFlags:
    """Balanced/static/strong flags of ``u``, evaluated in Par."""
    if not is_idempotent(u):
        raise NotIdempotent("map is not idempotent")
    return _flags(u, _PAR)
