"""The twelve acceptance criteria, one test each.

Every test records a PASS/FAIL line; ``conftest.py`` prints them at the end of
the run.  ``python tests/test_acceptance.py`` runs the criteria without pytest.
"""

from __future__ import annotations

import contextlib
import itertools
import random
import sys
from fractions import Fraction

import pytest

from parmarkov import conditionals as cd
from parmarkov import finmarkov as fm
from parmarkov import idempotents as idem
from parmarkov import lawsuite as ls
from parmarkov import parkernel as pk
from parmarkov import products as pr
from parmarkov import representability as rp
from parmarkov.cli import syntax as sx
from parmarkov.cli.substochastic import compose_substochastic
from parmarkov.enumeration import all_parmaps, all_subobjects
from parmarkov.parkernel import Subobject
from parmarkov.pullbacks import is_pullback
from parmarkov.semiring import UnsupportedInstance, get_semiring

Q, B, N = get_semiring("qnonneg"), get_semiring("bool"), get_semiring("nat")
INSTANCES = ("qnonneg", "bool", "nat")

RESULTS: dict[int, tuple[str, bool]] = {}


@contextlib.contextmanager
def criterion(number: int, title: str):
    ok = False
    try:
        yield
        ok = True
    finally:
        RESULTS[number] = (title, ok)
        print(f"criterion {number:2d} {title}: {'PASS' if ok else 'FAIL'}")


def _law(name: str, inst: str, samples: int, engine: str = "par", seed: int = 0):
    cfg = ls.GenConfig(seed=seed, samples=samples, max_object_size=4, instance=inst)
    return ls.check(name, cfg, engine=engine)


def _assert_clean(report):
    assert report.checked == report.samples, report
    assert report.failures == 0, f"{report.law}[{report.instance}]: {report.message}"


# 1 -------------------------------------------------------------------------


def test_criterion_01_coin_counterexample():
    with criterion(1, "coin counterexample"):
        for sr in (Q, B):
            one = fm.obj("pt", name="One")
            coin = fm.obj("H", "T", name="Coin")
            out = fm.obj("a", name="Out")
            half = sr.coerce(Fraction(1, 2)) if sr is Q else sr.one()
            p = pk.lift(fm.Kernel(one, coin, sr, {("pt",): {("H",): half, ("T",): half}}))
            f = pk.partial(coin, out, sr, {("H",): {("a",): sr.one()}})
            par = pk.par_compose(f, p)
            assert len(par.dom) == 0
            sub = compose_substochastic(f, p)
            if sr is Q:
                assert sub.columns[("pt",)] == {("a",): Fraction(1, 2)}
            else:
                assert sub.columns[("pt",)] == {("a",): True}


# 2 -------------------------------------------------------------------------


def test_criterion_02_restriction_structure():
    with criterion(2, "restriction structure"):
        for inst in INSTANCES:
            _assert_clean(_law("restriction_axioms", inst, 1000))
        bad = _law("restriction_axioms", "qnonneg", 1000, engine="substochastic")
        assert bad.failures > 0
        assert bad.message.startswith("R.1")
        print(f"  mutant witness: {bad.message}")
        # the shrunk witness still fails and cannot be shrunk further
        eng, lw = ls.ENGINES["substochastic"], ls.LAWS["restriction_axioms"]
        assert lw.check(bad.counterexample, eng) == bad.message
        assert ls.shrink(bad.counterexample, lambda c: lw.check(c, eng) not in (None, ls.SKIP)) == bad.counterexample


# 3 -------------------------------------------------------------------------


def test_criterion_03_structure_agreement():
    with criterion(3, "structure agreement"):
        for inst in INSTANCES:
            _assert_clean(_law("domain_agreement", inst, 1000))
            _assert_clean(_law("order_agreement", inst, 1000))


# 4 -------------------------------------------------------------------------


def test_criterion_04_positivity_and_enrichment():
    with criterion(4, "positivity and enrichment"):
        for inst in INSTANCES:
            r = _law("positivity", inst, 500)
            _assert_clean(r)
            assert r.skipped == 0
            _assert_clean(_law("enrichment", inst, 500))


# 5 -------------------------------------------------------------------------


def test_criterion_05_characterizations():
    with criterion(5, "totality and copyability characterizations"):
        for inst in INSTANCES:
            _assert_clean(_law("totality", inst, 1000))
            _assert_clean(_law("copyability", inst, 1000))


# 6 -------------------------------------------------------------------------


def test_criterion_06_conditionals():
    with criterion(6, "conditionals"):
        for inst in ("qnonneg", "bool"):
            g = ls.Generator(ls.GenConfig(seed=6, instance=inst, max_object_size=4))
            for _ in range(300):
                a, x, y = g.objects(3)
                u = g.parmap(a, fm.tensor(x, y))
                c = cd.par_conditional(u)
                assert cd.verify_conditional(u, c), u
        g = ls.Generator(ls.GenConfig(seed=6, instance="nat"))
        a, x, y = g.objects(3)
        u = g.parmap(a, fm.tensor(x, y))
        with pytest.raises(UnsupportedInstance):
            cd.par_conditional(u)


# 7 -------------------------------------------------------------------------


def _decomposes(u) -> bool:
    """``u = (D, i, i ∘ e)`` with ``e`` an idempotent kernel on ``D``."""
    d = u.dom.element_set
    if any(not u.ker.support(x) <= d for x in u.dom.elements):
        return False
    e = fm.corestrict(u.ker, u.dom.as_object)
    return fm.compose(e, e) == e


def _check_splitting(u, s):
    sr = u.semiring
    assert pk.par_compose(s.retraction, s.section) == pk.par_identity(s.through, sr)
    assert pk.par_compose(s.section, s.retraction) == u


def test_criterion_07_idempotents():
    with criterion(7, "idempotents"):
        count, unsplit = 0, []
        for n in range(0, 4):
            x = fm.obj(*"abc"[:n])
            for u in all_parmaps(x, x, B):
                assert idem.is_idempotent(u) == _decomposes(u)
                if not idem.is_idempotent(u):
                    continue
                count += 1
                assert idem.classify_idempotent(u) == idem.base_flags(idem.on_domain_idempotent(u))
                try:
                    _check_splitting(u, idem.split_idempotent(u))
                except idem.SplitFailure:
                    unsplit.append(u)
        g = ls.Generator(ls.GenConfig(seed=7, instance="qnonneg", max_object_size=4))
        for _ in range(200):
            u = g.idempotent(g.object("X"))
            assert idem.is_idempotent(u)
            _check_splitting(u, idem.split_idempotent(u))
        print(f"  boolean idempotents: {count}, without a splitting: {len(unsplit)}")
        assert not unsplit, f"{len(unsplit)} of {count} boolean idempotents do not split, e.g. {unsplit[0]}"


# 8 -------------------------------------------------------------------------


def test_criterion_08_representability():
    with criterion(8, "representability"):
        for n in range(1, 5):
            x = fm.obj(*"abcd"[:n])
            report = rp.monad_law_report(x, B)
            assert all(report.values()), (n, report)
            assert fm.compose(rp.samp(x, B), rp.delta(x, B)) == fm.identity(x, B)
            for sub in all_subobjects(x):
                assert rp.samp_pullback_check(sub, B, probe_size=1)
                if n <= 3:
                    assert rp.samp_pullback_check(sub, B, probe_size=2)
        for n, m in itertools.product(range(1, 4), repeat=2):
            x, y = fm.obj(*"abc"[:n]), fm.obj(*"uvw"[:m])
            assert rp.hom_bijection_check(x, y, B), (n, m)
            for u in all_parmaps(x, y, B):
                assert rp.pushforward(u) == rp.pushforward_via_adjunction(u)


# 9 -------------------------------------------------------------------------


def _semilattice(x, top_to=None):
    pa = rp.dist_object(x, B)
    order = x.index
    cols = {}
    for s in pa.carrier.elements:
        members = pa.decode(s)
        pick = max(members, key=order.__getitem__)
        if top_to is not None and len(members) == len(x):
            pick = top_to
        cols[s] = {pick: True}
    dom = Subobject.full(pa.carrier)
    return rp.PartialAlgebraCandidate(x, dom, fm.Kernel(dom.as_object, x, B, cols))


def _extraction(x):
    pa = rp.dist_object(x, B)
    singles = [pa.encode({e}) for e in x.elements]
    dom = Subobject.of(pa.carrier, singles)
    cols = {pa.encode({e}): {e: True} for e in x.elements}
    return rp.PartialAlgebraCandidate(x, dom, fm.Kernel(dom.as_object, x, B, cols))


def test_criterion_09_partial_algebras():
    with criterion(9, "partial algebras"):
        for n in range(1, 4):
            x = fm.obj(*range(n))
            assert rp.check_partial_algebra(_semilattice(x)).passed
            assert rp.check_partial_algebra(_extraction(x)).passed
        x = fm.obj(0, 1, 2)
        report = rp.check_partial_algebra(_semilattice(x, top_to=(0,)))
        failing = [r for r in report.results if not r.passed]
        assert [r.condition for r in failing] == ["commutation"]
        assert failing[0].witness is not None
        print(f"  perturbed semilattice witness: {fm.format_element(failing[0].witness)}")


# 10 ------------------------------------------------------------------------


def _two_map_family():
    x = fm.obj("a", "b", name="X")
    y = fm.obj("u", "v", name="Y")
    g = pk.partial(x, y, Q, {("a",): {("u",): Fraction(1, 2), ("v",): Fraction(1, 2)}})
    h = pk.partial(x, y, Q, {("b",): {("v",): Fraction(1)}})
    xx = fm.tensor(x, x)
    disc = pk.par_discard(x, Q)
    legs = {(0, 1): pk.par_tensor(g, h), (0,): pk.par_tensor(g, disc), (1,): pk.par_tensor(disc, h)}
    return pr.LaxCone(xx, [y, y], legs, Q)


def test_criterion_10_lax_products():
    with criterion(10, "lax products"):
        g = ls.Generator(ls.GenConfig(seed=10, instance="qnonneg", max_object_size=3))
        for k in range(0, 4):
            for _ in range(20):
                maps = [g.parmap(g.object(), g.object()) for _ in range(k)]
                expected = pk.par_identity(fm.UNIT, Q)
                for m in maps:
                    expected = pk.par_tensor(expected, m)
                assert pr.tensor_family(maps, Q) == expected

        cone = _two_map_family()
        assert pr.is_lax_cone(cone)[0] and not pr.is_strict_cone(cone)
        induced = pr.lax_induced_map(cone)
        meet = pr.subobject_meet([leg.dom for leg in cone.all_legs().values()], cone.apex)
        assert induced.dom == meet
        assert pr.factors_through(cone, induced)
        competitors = 0
        rng = random.Random(10)
        full = cone.legs[cone.index]
        while competitors < 200:
            if rng.random() < 0.5:
                sub = Subobject.of(cone.apex, [e for e in cone.apex.elements if rng.random() < 0.5])
                h = pk.restrict_to(full, sub & full.dom)
            else:
                h = g.parmap(cone.apex, full.target)
            if not pr.factors_through(cone, h):
                continue
            competitors += 1
            assert pk.span_geq(induced, h)

        for _ in range(30):
            u = g.parmap(g.object(), g.object())
            for k in range(0, 4):
                big = pr.infinite_copy(u, k)
                objs = [u.target] * k
                for f in pr.subsets(k):
                    marg = pk.par_compose(pr.marginalization(objs, range(k), f, Q), big)
                    assert marg == pr.copy_power(u, len(f))


# 11 ------------------------------------------------------------------------


def test_criterion_11_meets_and_boxes():
    with criterion(11, "meets, boxes and marginal fibres"):
        x = fm.obj("a", "b", "c")
        subs = list(all_subobjects(x))
        for k in (1, 2, 3):
            for family in itertools.product(subs, repeat=k):
                assert pr.subobject_meet(list(family)) == pr.subobject_meet_by_pullback(list(family), B)
                assert pr.subobject_meet(list(family)) == pr.subobject_meet_by_pullback(list(family), Q)
        two = fm.obj(0, 1)
        subs2 = list(all_subobjects(two))
        for k in (1, 2, 3):
            for family in itertools.product(subs2, repeat=k):
                assert pr.box_cutout_check(list(family))
                for chosen in pr.subsets(k):
                    for sr in (B, N):
                        top, left, right, bottom = pr.marginal_fibre_square(list(family), chosen, sr)
                        assert is_pullback(top, left, right, bottom, probe_size=1)


# 12 ------------------------------------------------------------------------

MALFORMED = {
    "f ;; g": (1, 4),
    "copy(X": (1, 7),
    "f ;\n  dom(g * )": (2, 11),
}


def test_criterion_12_parser():
    with criterion(12, "parser"):
        rng = random.Random(12)
        seen = set()
        for _ in range(200):
            t = ls.gen_term(rng, 4)
            text = sx.to_text(t)
            assert sx.parse(text) == t, text
            assert sx.to_text(sx.parse(text)) == text
            seen.add(text)
        assert len(seen) > 100
        for text, (line, column) in MALFORMED.items():
            with pytest.raises(sx.ParseError) as info:
                sx.parse(text)
            assert (info.value.line, info.value.column) == (line, column), str(info.value)
            print(f"  {text!r}: {info.value}")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for t in tests:
        with contextlib.suppress(Exception):
            t()
    sys.exit(0 if all(ok for _, ok in RESULTS.values()) else 1)
