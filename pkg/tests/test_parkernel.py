import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parmarkov import finmarkov as fm
from parmarkov import parkernel as pk
from parmarkov.finmarkov import ShapeError
from parmarkov.lawsuite import GenConfig, Generator
from parmarkov.parkernel import ParMap, Subobject

from helpers import HALF, B, N, Q, coin_fixture, kern, part

ONE_TWO = fm.obj(1, 2)
UV = fm.obj("u", "v")


def test_pullback_along_kernel():
    f = kern(ONE_TWO, UV, Q, {1: {"u": 1}, 2: {"u": HALF, "v": HALF}})
    assert pk.pullback_det_mono(f, Subobject.of(UV, [("u",)])).elements == ((1,),)
    assert pk.pullback_det_mono(f, Subobject.full(UV)) == Subobject.full(ONE_TWO)
    g = kern(fm.obj(1), UV, B, {1: {"u": True, "v": True}})
    assert len(pk.pullback_det_mono(g, Subobject.of(UV, [("u",)]))) == 0


@pytest.mark.parametrize("sr", [Q, B])
def test_coin_composite_is_nowhere_defined(sr):
    one, coin, out, p, f = coin_fixture(sr)
    c = pk.par_compose(f, p)
    assert len(c.dom) == 0 and c.ker.columns == {}
    assert c == pk.empty_map(one, out, sr)


def test_tensor_domains_multiply():
    coin = fm.obj("H", "T")
    u = part(coin, fm.obj("a"), Q, {"H": {"a": 1}})
    v = pk.lift(fm.identity(UV, Q))
    t = pk.par_tensor(u, v)
    assert t.dom.element_set == {("H", "u"), ("H", "v")}


def test_totality_examples():
    one, coin, out, p, f = coin_fixture(Q)
    assert pk.is_total(p) and pk.is_total_by_equation(p)
    assert not pk.is_total(f) and not pk.is_total_by_equation(f)
    empty = pk.empty_map(coin, out, Q)
    assert not pk.is_total(empty) and not pk.is_total_by_equation(empty)


def test_copyability_examples():
    one, coin, out, p, f = coin_fixture(Q)
    assert not pk.is_copyable(p) and not pk.is_copyable_by_equation(p)
    assert pk.is_copyable(f) and pk.is_copyable_by_equation(f)
    assert pk.is_copyable(pk.par_dom(p)) and pk.is_copyable(pk.par_dom(f))


def test_order_examples():
    one, coin, out, p, f = coin_fixture(Q)
    assert pk.extends(f, pk.empty_map(coin, out, Q))
    assert pk.span_geq(f, pk.empty_map(coin, out, Q))
    g = pk.lift(kern(coin, UV, Q, {"H": {"u": 1}, "T": {"v": 1}}))
    g2 = pk.lift(kern(coin, UV, Q, {"H": {"u": 1}, "T": {"u": 1}}))
    assert not pk.extends(g, g2) and not pk.span_geq(g, g2)
    assert pk.extends(g, pk.restrict_to(g, Subobject.of(coin, [("H",)])))


def test_par_dom_is_inclusion_on_domain():
    one, coin, out, p, f = coin_fixture(Q)
    d = pk.par_dom(f)
    assert d.dom == f.dom and d.ker.columns == {("H",): {("H",): 1}}
    assert pk.cd_dom(f) == d


def test_parmap_validates_domain():
    coin = fm.obj("H", "T")
    k = fm.identity(coin, Q)
    with pytest.raises(ShapeError):
        ParMap(coin, Subobject.of(coin, [("H",)]), k)
    with pytest.raises(ShapeError):
        Subobject.of(coin, [("Z",)])


def test_not_parallel():
    coin = fm.obj("H", "T")
    with pytest.raises(ShapeError):
        pk.span_geq(pk.par_identity(coin, Q), pk.par_identity(UV, Q))


def test_equality_is_structural():
    coin = fm.obj("H", "T")
    a = part(coin, UV, N, {"H": {"u": 1}})
    b = part(coin, UV, N, {"H": {"u": 1}})
    assert a == b and hash(a) == hash(b)
    assert a != part(coin, UV, N, {"T": {"u": 1}})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["qnonneg", "bool", "nat"]))
def test_domain_laws(seed, inst):
    g = Generator(GenConfig(seed=seed, instance=inst, max_object_size=3))
    x, y, z = g.objects(3)
    u, v, w = g.parmap(x, y), g.parmap(y, z), g.parmap(z, x)
    assert pk.par_tensor(u, v).dom == pk.subobject_tensor(u.dom, v.dom)
    assert pk.par_compose(v, u).dom <= u.dom
    assert pk.par_compose(w, pk.par_compose(v, u)) == pk.par_compose(pk.par_compose(w, v), u)
    assert pk.par_compose(u, pk.par_dom(u)) == u
    assert pk.cd_dom(u) == pk.par_dom(u)
