import pytest

from parmarkov import finmarkov as fm
from parmarkov import parkernel as pk
from parmarkov import representability as rp
from parmarkov.finmarkov import SetLabel
from parmarkov.parkernel import Subobject
from parmarkov.semiring import UnsupportedInstance

from helpers import B, N, Q, kern, part

BIT = fm.obj(0, 1)
AB = fm.obj("a", "b")


def subset(*labels):
    return (SetLabel((x,) for x in labels),)


def test_distribution_object_sizes():
    assert len(rp.dist_object(fm.obj(0, 1, 2), B).carrier) == 7
    assert rp.dist_object(AB, N).carrier == AB
    with pytest.raises(UnsupportedInstance):
        rp.dist_object(AB, Q)


def test_samp_after_delta_is_identity():
    for x in (BIT, fm.obj(0, 1, 2)):
        assert fm.compose(rp.samp(x, B), rp.delta(x, B)) == fm.identity(x, B)
        assert fm.compose(rp.samp(x, N), rp.delta(x, N)) == fm.identity(x, N)


def test_sharp_encodes_image():
    u = part(fm.obj("x"), AB, B, {"x": {"a": True, "b": True}})
    s = rp.sharp(u)
    assert s.ker.columns == {("x",): {subset("a", "b"): True}}
    assert pk.is_copyable(s)


def test_pushforward_examples():
    u = pk.lift(kern(BIT, AB, B, {0: {"a": True}, 1: {"a": True, "b": True}}))
    pu = rp.pushforward(u)
    assert pu(subset(0, 1)) == {subset("a", "b"): True}
    assert pu(subset(0)) == {subset("a"): True}
    v = part(BIT, AB, B, {0: {"b": True}})
    pv = rp.pushforward(v)
    assert pv.dom.elements == (subset(0),)
    assert pv == rp.pushforward_via_adjunction(v)


def test_monad_laws():
    for n in range(1, 4):
        x = fm.obj(*range(n))
        assert all(rp.monad_law_report(x, B).values())
        assert all(rp.monad_law_report(x, N).values())


def test_samp_square_examples():
    assert rp.samp_pullback_check(Subobject.full(BIT), B)
    assert rp.samp_pullback_check(Subobject.of(BIT, [(0,)]), B)
    assert rp.samp_pullback_check(Subobject.of(BIT, [(0,)]), B, probe_size=2)
    assert rp.samp_pullback_check(Subobject.of(BIT, [(1,)]), N)


def test_hom_bijection_small():
    assert rp.hom_bijection_check(BIT, AB, B)
    assert rp.hom_bijection_check(BIT, AB, N)


def _algebra(x, table, dom=None):
    pa = rp.dist_object(x, B)
    cols = {pa.encode(set(s)): {(a,): True} for s, a in table.items()}
    d = Subobject.of(pa.carrier, cols) if dom is None else dom
    return rp.PartialAlgebraCandidate(x, d, fm.Kernel(d.as_object, x, B, cols))


def test_join_semilattice_passes():
    table = {((0,),): 0, ((1,),): 1, ((0,), (1,)): 1}
    assert rp.check_partial_algebra(_algebra(BIT, table)).passed


def test_min_semilattice_on_two_points_is_an_algebra():
    # sending {0, 1} to 0 yields the opposite order, itself a semilattice
    table = {((0,),): 0, ((1,),): 1, ((0,), (1,)): 0}
    assert rp.check_partial_algebra(_algebra(BIT, table)).passed


def test_extraction_passes():
    x = fm.obj(0, 1, 2)
    table = {((i,),): i for i in range(3)}
    report = rp.check_partial_algebra(_algebra(x, table))
    assert report.passed
    assert [r.condition for r in report.results] == ["unit", "multiplication_domain", "commutation"]


def test_perturbed_semilattice_fails_commutation():
    x = fm.obj(0, 1, 2)
    table = {}
    for mask in range(1, 8):
        members = tuple((i,) for i in range(3) if mask >> i & 1)
        table[members] = max(i for (i,) in members)
    table[((0,), (1,), (2,))] = 0
    report = rp.check_partial_algebra(_algebra(x, table))
    assert report["unit"].passed and report["multiplication_domain"].passed
    bad = report["commutation"]
    assert not bad.passed
    assert fm.format_element(bad.witness) == "{{0, 1}, {2}}"


def test_missing_unit():
    table = {((0,),): 0}
    report = rp.check_partial_algebra(_algebra(BIT, table))
    assert not report["unit"].passed and report["unit"].witness == (1,)
