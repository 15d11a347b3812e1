"""Seeded generators and the law battery with greedy counterexample shrinking.

Each law draws a small tuple of partial maps (its *case*) and evaluates a
predicate through an :class:`Engine`.  The default engine is the partial-map
category itself; :class:`SubStochasticEngine` swaps in sub-stochastic
composition so the battery can be seen to fail.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import finmarkov as fm
from . import parkernel as pk
from .cli.substochastic import chapman_kolmogorov
from .finmarkov import FinObject, Kernel
from .parkernel import ParMap, Subobject
from .semiring import Semiring, SemiringValue, get_semiring

LABELS = "abcdefghijklmnop"
NAMES = "XYZWVU"
BATCH = 100
DEFAULT_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1))


class UnknownLaw(KeyError):
    pass


SKIP = "skip"  # a case whose precondition does not hold


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    samples: int = 200
    max_object_size: int = 4
    value_grid: tuple | None = None
    instance: str = "qnonneg"
    empty_domain_prob: float = 0.1
    jobs: int = 1

    @property
    def semiring(self) -> Semiring:
        return get_semiring(self.instance)

    def grid(self) -> tuple:
        sr = self.semiring
        if self.value_grid is None:
            return DEFAULT_GRID if sr.tag == "qnonneg" else (sr.zero(), sr.one())
        if not self.value_grid:
            raise ValueError("empty value grid")
        out = []
        for v in self.value_grid:
            if isinstance(v, SemiringValue):
                v = v.payload
            elif isinstance(v, str):
                v = sr.parse(v)
            out.append(sr.coerce(v))
        if all(sr.is_zero(v) for v in out):
            raise ValueError("value grid has no nonzero entry")
        return tuple(out)


class Generator:
    """Random objects and maps drawn from one ``random.Random`` stream."""

    def __init__(self, cfg: GenConfig, rng: random.Random | None = None):
        if cfg.max_object_size < 1:
            raise ValueError("max_object_size must be at least 1")
        self.cfg = cfg
        self.sr = cfg.semiring
        self.grid = cfg.grid()
        self.rng = rng if rng is not None else random.Random(cfg.seed)

    def object(self, name: str | None = None, max_size: int | None = None) -> FinObject:
        n = self.rng.randint(1, min(max_size or self.cfg.max_object_size, self.cfg.max_object_size))
        return fm.obj(*LABELS[:n], name=name)

    def objects(self, k: int, max_size: int | None = None) -> list[FinObject]:
        return [self.object(NAMES[i], max_size) for i in range(k)]

    def subobject(self, x: FinObject) -> Subobject:
        r = self.rng.random()
        if r < self.cfg.empty_domain_prob:
            return Subobject.empty(x)
        if r < self.cfg.empty_domain_prob + 0.35:
            return Subobject.full(x)
        return Subobject.of(x, [e for e in x.elements if self.rng.random() < 0.6])

    def column(self, target: FinObject, deterministic: bool = False) -> dict:
        sr, rng = self.sr, self.rng
        els = target.elements
        if deterministic or sr.tag == "nat":
            return {rng.choice(els): sr.one()}
        if sr.tag == "bool":
            picked = [y for y in els if rng.random() < 0.5] or [rng.choice(els)]
            return {y: sr.one() for y in picked}
        weights = {y: rng.choice(self.grid) for y in els}
        weights = {y: w for y, w in weights.items() if not sr.is_zero(w)}
        if not weights:
            return {rng.choice(els): sr.one()}
        total = sr.total(weights.values())
        return {y: sr.divide(w, total) for y, w in weights.items()}

    def kernel(self, source: FinObject, target: FinObject, deterministic: bool = False) -> Kernel:
        cols = {x: self.column(target, deterministic) for x in source.elements}
        return Kernel(source, target, self.sr, cols)

    def parmap(self, source: FinObject, target: FinObject, copyable: bool = False, total: bool = False) -> ParMap:
        dom = Subobject.full(source) if total else self.subobject(source)
        cols = {x: self.column(target, copyable) for x in dom.elements}
        return pk.partial(source, target, self.sr, cols)

    def partial_identity(self, x: FinObject) -> ParMap:
        return pk.par_dom(pk.restrict_to(pk.par_identity(x, self.sr), self.subobject(x)))

    def constant(self, source: FinObject, target: FinObject) -> ParMap:
        point = self.rng.choice(target.elements)
        dom = self.subobject(source)
        return pk.partial(source, target, self.sr, {x: {point: self.sr.one()} for x in dom.elements})

    def idempotent(self, x: FinObject) -> ParMap:
        """A random idempotent ``(D, i ∘ s ∘ r)`` built from a splitting with ``r ∘ s = id``.

        The section rows have pairwise disjoint supports inside ``D`` and the
        retraction sends each support point back to its own row.
        """
        sr, rng = self.sr, self.rng
        dom = [e for e in x.elements if rng.random() < 0.75] or [rng.choice(x.elements)]
        rng.shuffle(dom)
        k = rng.randint(1, len(dom))
        cuts = sorted(rng.sample(range(1, len(dom)), k - 1)) if k > 1 else []
        blocks = [dom[i:j] for i, j in zip([0] + cuts, cuts + [len(dom)])]
        rows, owner = [], {}
        for c, block in enumerate(blocks):
            supp = [e for e in block if rng.random() < 0.6] or [block[0]]
            rows.append(self.column(FinObject(tuple(supp), x.arity)) if sr.tag != "nat" else {supp[0]: sr.one()})
            for e in rows[-1]:
                owner[e] = c
        split = fm.obj(*range(k))
        cols = {}
        for d in dom:
            if d in owner:
                r_col = {(owner[d],): sr.one()}
            else:
                r_col = self.column(split)
            acc = {}
            for (c,), w in r_col.items():
                for y, v in rows[c].items():
                    acc[y] = sr.plus(acc.get(y, sr.zero()), sr.times(w, v))
            cols[d] = acc
        return pk.partial(x, x, sr, cols)


def _fresh(cfg: GenConfig) -> Generator:
    return Generator(cfg, random.Random(cfg.seed))


def gen_object(cfg: GenConfig) -> FinObject:
    return _fresh(cfg).object("X")


def gen_subobject(cfg: GenConfig) -> Subobject:
    g = _fresh(cfg)
    return g.subobject(g.object("X"))


def gen_kernel(cfg: GenConfig) -> Kernel:
    g = _fresh(cfg)
    x, y = g.objects(2)
    return g.kernel(x, y)


def gen_parmap(cfg: GenConfig) -> ParMap:
    g = _fresh(cfg)
    x, y = g.objects(2)
    return g.parmap(x, y)


TERM_NAMES = ("f", "g", "h", "p", "u2")
TERM_OBJECTS = ("X", "Y", "Coin")


def gen_obj_expr(rng: random.Random, depth: int = 2):
    from .cli import syntax as sx

    r = rng.random()
    if depth <= 0 or r < 0.5:
        return sx.ObjName(rng.choice(TERM_OBJECTS)) if rng.random() < 0.85 else sx.ObjUnit()
    if r < 0.7:
        return sx.ObjDist(gen_obj_expr(rng, depth - 1))
    parts = []
    for _ in range(rng.randint(2, 3)):
        p = gen_obj_expr(rng, depth - 1)
        parts.extend(p.parts if isinstance(p, sx.ObjTensor) else [p])
    return sx.ObjTensor(tuple(parts))


def gen_term(rng: random.Random, depth: int = 3):
    """A random term; object tensors are kept flat, as the parser produces them."""
    from .cli import syntax as sx

    if depth <= 0:
        return sx.Name(rng.choice(TERM_NAMES))
    r = rng.random()
    if r < 0.2:
        return sx.Name(rng.choice(TERM_NAMES))
    if r < 0.35:
        op = rng.choice(sorted(sx.OBJ_OPS))
        return sx.Structural(op, tuple(gen_obj_expr(rng) for _ in range(sx.OBJ_OPS[op])))
    if r < 0.5:
        return sx.Unary(rng.choice(sx.TERM_OPS), gen_term(rng, depth - 1))
    if r < 0.55:
        return sx.ICopy(gen_term(rng, depth - 1), rng.randint(0, 4))
    if r < 0.8:
        return sx.Seq(gen_term(rng, depth - 1), gen_term(rng, depth - 1))
    return sx.Ten(gen_term(rng, depth - 1), gen_term(rng, depth - 1))


class ParEngine:
    """Composition, tensor and domains of the partial-map category."""

    name = "par"

    def compose(self, v: ParMap, u: ParMap) -> ParMap:
        return pk.par_compose(v, u)

    def tensor(self, u: ParMap, v: ParMap) -> ParMap:
        return pk.par_tensor(u, v)

    def dom(self, u: ParMap) -> ParMap:
        return pk.par_dom(u)

    def support(self, u: ParMap) -> Subobject:
        """The subset of inputs with a nonzero column."""
        return u.dom

    def identity(self, x, sr):
        return pk.par_identity(x, sr)

    def copy(self, x, sr):
        return pk.par_copy(x, sr)

    def discard(self, x, sr):
        return pk.par_discard(x, sr)

    def cd_dom(self, u: ParMap) -> ParMap:
        sr, x = u.semiring, u.source
        marker = self.compose(self.discard(u.target, sr), u)
        return self.compose(self.tensor(self.identity(x, sr), marker), self.copy(x, sr))

    def extends(self, u: ParMap, v: ParMap) -> bool:
        return self.compose(u, self.cd_dom(v)) == v

    def copy_equation(self, u: ParMap) -> bool:
        sr = u.semiring
        lhs = self.compose(self.copy(u.target, sr), u)
        return lhs == self.compose(self.tensor(u, u), self.copy(u.source, sr))


class SubStochasticEngine(ParEngine):
    """Deliberately wrong: sub-stochastic composition and the mass-weighted domain."""

    name = "substochastic"

    def compose(self, v, u):
        k = chapman_kolmogorov(v, u)
        return pk._raw(u.source, v.target, u.semiring, {x: c for x, c in k.columns.items() if c})

    def dom(self, u):
        return self.cd_dom(u)


ENGINES = {"par": ParEngine(), "substochastic": SubStochasticEngine()}


@dataclass(frozen=True)
class Law:
    name: str
    generate: Callable
    check: Callable
    summary: str = ""


LAWS: dict[str, Law] = {}


def law(name: str, summary: str = ""):
    def register(gen):
        def wrap(check):
            LAWS[name] = Law(name, gen, check, summary)
            return check
        return wrap
    return register


def _triple(g: Generator):
    x, y, z = g.objects(3)
    return g.parmap(x, y), g.parmap(x, z), g.parmap(y, z)


@law("restriction_axioms", "R.1 to R.4 for the domain operator")(_triple)
def _restriction(case, e: ParEngine):
    f, g, k = case
    c, bar = e.compose, e.dom
    kf = c(k, f)
    if c(f, bar(f)) != f:
        return "R.1 fails: f ∘ dom f ≠ f"
    if c(kf, bar(kf)) != kf:
        return "R.1 fails on the composite: w ∘ dom w ≠ w for w = k ∘ f"
    if c(bar(f), bar(g)) != c(bar(g), bar(f)):
        return "R.2 fails: dom f ∘ dom g ≠ dom g ∘ dom f"
    if bar(c(g, bar(f))) != c(bar(g), bar(f)):
        return "R.3 fails: dom(g ∘ dom f) ≠ dom g ∘ dom f"
    if c(bar(k), f) != c(f, bar(kf)):
        return "R.4 fails: dom k ∘ f ≠ f ∘ dom(k ∘ f)"
    return None


def _pair(g: Generator):
    x, y, z = g.objects(3)
    return g.parmap(x, y), g.parmap(y, z)


@law("quasi_totality", "every map absorbs its own domain")(_pair)
def _quasi_total(case, e):
    f, k = case
    for label, m in (("f", f), ("k ∘ f", e.compose(k, f))):
        if e.compose(m, e.cd_dom(m)) != m:
            return f"{label} ∘ dom({label}) ≠ {label}"
    return None


def _positivity_case(g: Generator):
    x, y, z = g.objects(3)
    strategy = g.rng.randrange(3)
    if strategy == 0:
        return g.parmap(x, y, copyable=True), g.parmap(y, z, copyable=True)
    if strategy == 1:
        return g.parmap(x, y), g.constant(y, z)
    for _ in range(30):
        u, v = g.parmap(x, y), g.parmap(y, z)
        if pk.is_copyable(pk.par_compose(v, u)):
            return u, v
    return g.parmap(x, y, copyable=True), g.parmap(y, z, copyable=True)


@law("positivity", "copyable composites split the joint into an independent pair")(_positivity_case)
def _positivity(case, e):
    u, v = case
    sr = u.semiring
    w = e.compose(v, u)
    if not e.copy_equation(w):
        return SKIP
    lhs = e.compose(e.tensor(v, e.identity(u.target, sr)), e.compose(e.copy(u.target, sr), u))
    rhs = e.compose(e.tensor(w, u), e.copy(u.source, sr))
    if lhs != rhs:
        return "(v ⊗ id) ∘ cop ∘ u ≠ ((v ∘ u) ⊗ u) ∘ cop although v ∘ u is copyable"
    return None


@law("domain_agreement", "the copy/discard domain equals the span domain")(_pair)
def _domain_agreement(case, e):
    f, k = case
    for label, m in (("f", f), ("k ∘ f", e.compose(k, f))):
        if e.cd_dom(m) != pk.par_dom(pk.restrict_to(m, e.support(m))):
            return f"copy/discard domain of {label} differs from its span domain"
    return None


def _order_case(g: Generator):
    x, y, z = g.objects(3)
    return g.parmap(x, y), g.parmap(y, z), g.partial_identity(x), g.parmap(x, y)


@law("order_agreement", "the extension order equals the span order")(_order_case)
def _order(case, e):
    f, k, d, h = case
    kf = e.compose(k, f)
    pairs = [(f, e.compose(f, d)), (kf, e.compose(kf, d)), (f, h), (h, f)]
    for a, b in pairs:
        if e.extends(a, b) != pk.span_geq(a, b):
            return "extension order and span order disagree"
    return None


def _enrichment_case(g: Generator):
    x, y, z = g.objects(3)
    return g.parmap(x, y), g.parmap(y, z), g.partial_identity(x), g.partial_identity(y)


@law("enrichment", "composition and tensor are monotone in the extension order")(_enrichment_case)
def _enrichment(case, e):
    u, v, dx, dy = case
    u2, v2 = e.compose(u, dx), e.compose(v, dy)
    if not (e.extends(u, u2) and e.extends(v, v2)):
        return "restricted maps are not below the originals"
    if not e.extends(e.compose(v, u), e.compose(v2, u2)):
        return "composition is not monotone"
    if not e.extends(e.tensor(u, v), e.tensor(u2, v2)):
        return "tensor is not monotone"
    return None


@law("totality", "total ⇔ full domain ⇔ discard equation")(_pair)
def _totality(case, e):
    f, k = case
    for label, m in (("f", f), ("k ∘ f", e.compose(k, f))):
        sr = m.semiring
        by_dom = e.dom(m) == e.identity(m.source, sr)
        by_support = e.support(m).is_full()
        by_eq = e.compose(e.discard(m.target, sr), m) == e.discard(m.source, sr)
        if not by_dom == by_support == by_eq:
            return f"totality characterizations of {label} disagree: {by_dom}, {by_support}, {by_eq}"
    return None


def _copyability_case(g: Generator):
    x, y, z = g.objects(3)
    copyable = g.rng.random() < 0.5
    return g.parmap(x, y, copyable=copyable), g.parmap(y, z, copyable=copyable)


@law("copyability", "copyable ⇔ deterministic kernel ⇔ copy equation")(_copyability_case)
def _copyability(case, e):
    f, k = case
    for label, m in (("f", f), ("k ∘ f", e.compose(k, f))):
        single = all(len(c) == 1 for c in m.ker.columns.values())
        flags = (pk.is_copyable(m), single, fm.is_deterministic(m.ker), e.copy_equation(m))
        if len(set(flags)) != 1:
            return f"copyability characterizations of {label} disagree: {flags}"
    return None


def _interchange_case(g: Generator):
    a, b, c, d, x, y = (g.object(n, 3) for n in "ABCDEF")
    return g.parmap(a, b), g.parmap(b, c), g.parmap(d, x), g.parmap(x, y)


@law("interchange", "(v1 ⊗ v2) ∘ (u1 ⊗ u2) = (v1 ∘ u1) ⊗ (v2 ∘ u2) and dom(u ⊗ v) = dom u ⊗ dom v")(_interchange_case)
def _interchange(case, e):
    u1, v1, u2, v2 = case
    if e.compose(e.tensor(v1, v2), e.tensor(u1, u2)) != e.tensor(e.compose(v1, u1), e.compose(v2, u2)):
        return "interchange law fails"
    if e.support(e.tensor(u1, u2)) != pk.subobject_tensor(e.support(u1), e.support(u2)):
        return "domain of a tensor is not the tensor of the domains"
    return None


def _stability_case(g: Generator):
    x, y, z, w = (g.object(n, 3) for n in "XYZW")
    return g.parmap(x, y, total=True), g.parmap(z, w, total=True), g.partial_identity(y), g.partial_identity(w)


@law("tensor_pullback_stability", "pullbacks along subset inclusions are stable under tensor")(_stability_case)
def _stability(case, e):
    f, g, s, t = case
    if not (pk.is_total(f) and pk.is_total(g)):
        return SKIP
    ft = e.tensor(f, g)
    via_domain = e.support(e.compose(e.tensor(s, t), ft))
    pulled = pk.pullback_det_mono(ft.ker, pk.subobject_tensor(s.dom, t.dom))
    if via_domain != pulled:
        return "domain of the composite with the partial identity is not the pullback"
    if pulled != pk.subobject_tensor(pk.pullback_det_mono(f.ker, s.dom), pk.pullback_det_mono(g.ker, t.dom)):
        return "pullback of a tensor is not the tensor of the pullbacks"
    return None


# shrinking -----------------------------------------------------------------


def _renormalize(col: dict, sr: Semiring) -> dict:
    if sr.tag != "qnonneg" or not col:
        return col
    total = sr.total(col.values())
    return {y: sr.divide(w, total) for y, w in col.items()}


def _rebuild(u: ParMap, source: FinObject, target: FinObject, cols: dict) -> ParMap:
    return pk._raw(source, target, u.semiring, {x: c for x, c in cols.items() if c})


def _drop_element(case, o: FinObject, e) -> tuple:
    smaller = fm.obj(*(x[0] for x in o.elements if x != e), name=o.name)
    out = []
    for u in case:
        source = smaller if u.source == o else u.source
        target = smaller if u.target == o else u.target
        cols = {}
        for x, col in u.ker.columns.items():
            if u.source == o and x == e:
                continue
            if u.target == o:
                col = _renormalize({y: w for y, w in col.items() if y != e}, u.semiring)
            cols[x] = col
        out.append(_rebuild(u, source, target, cols))
    return tuple(out)


def _size(case) -> int:
    objects = {o for u in case for o in (u.source, u.target)}
    return sum(len(o) for o in objects) + sum(len(u.dom) + sum(map(len, u.ker.columns.values())) for u in case)


def _shrink_candidates(case):
    objects = []
    for u in case:
        for o in (u.source, u.target):
            if o.arity == 1 and len(o) > 1 and o not in objects:
                objects.append(o)
    for o in objects:
        for e in o.elements:
            yield _drop_element(case, o, e)
    for i, u in enumerate(case):
        for x in u.dom.elements:
            yield case[:i] + (pk.restrict_to(u, Subobject.of(u.source, [d for d in u.dom.elements if d != x])),) + case[i + 1:]
    for i, u in enumerate(case):
        for x, col in u.ker.columns.items():
            if len(col) < 2:
                continue
            for y in col:
                cols = dict(u.ker.columns)
                cols[x] = _renormalize({z: w for z, w in col.items() if z != y}, u.semiring)
                yield case[:i] + (_rebuild(u, u.source, u.target, cols),) + case[i + 1:]


def shrink(case: tuple, fails: Callable[[tuple], bool]) -> tuple:
    """Greedy descent: take the first smaller candidate that still fails."""
    while True:
        for cand in _shrink_candidates(case):
            if _size(cand) >= _size(case):
                continue
            try:
                bad = fails(cand)
            except (ValueError, KeyError):
                bad = False
            if bad:
                case = cand
                break
        else:
            return case


# running -------------------------------------------------------------------


@dataclass
class LawReport:
    law: str
    instance: str
    engine: str
    samples: int
    checked: int = 0
    skipped: int = 0
    failures: int = 0
    message: str = ""
    counterexample: tuple | None = None
    seed: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _run_batch(law_name: str, cfg: GenConfig, index: int, count: int, engine_name: str, stop_early: bool):
    lw, eng = LAWS[law_name], ENGINES[engine_name]
    g = Generator(cfg, random.Random(f"{cfg.seed}:{index}"))
    checked = skipped = failures = 0
    first = None
    for _ in range(count):
        case = lw.generate(g)
        msg = lw.check(case, eng)
        checked += 1
        if msg is SKIP:
            skipped += 1
            continue
        if msg is None:
            continue
        failures += 1
        if first is None:
            first = (case, msg)
            if stop_early:
                break
    return checked, skipped, failures, first


def check(law_name: str, cfg: GenConfig, engine: str = "par", stop_early: bool | None = None) -> LawReport:
    """Run one law on ``cfg.samples`` generated cases and shrink the first failure."""
    if law_name not in LAWS:
        raise UnknownLaw(law_name)
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if stop_early is None:
        stop_early = engine != "par"
    batches = [(i, min(BATCH, cfg.samples - i * BATCH)) for i in range((cfg.samples + BATCH - 1) // BATCH)]
    args = [(law_name, cfg, i, n, engine, stop_early) for i, n in batches]
    if cfg.jobs > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_batch, *zip(*args)))
    else:
        results = [_run_batch(*a) for a in args]

    report = LawReport(law_name, cfg.instance, engine, cfg.samples, seed=cfg.seed)
    for checked, skipped, failures, first in results:
        report.checked += checked
        report.skipped += skipped
        report.failures += failures
        if first is not None and report.counterexample is None:
            report.counterexample, report.message = first
        if stop_early and report.failures:
            break
    if report.counterexample is not None:
        lw, eng = LAWS[law_name], ENGINES[engine]
        report.counterexample = shrink(report.counterexample, lambda c: lw.check(c, eng) not in (None, SKIP))
        report.message = lw.check(report.counterexample, eng)
    return report


def check_all(cfg: GenConfig, engine: str = "par") -> list[LawReport]:
    return [check(name, cfg, engine) for name in LAWS]
