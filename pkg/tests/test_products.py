import itertools
from fractions import Fraction

import pytest

from parmarkov import finmarkov as fm
from parmarkov import parkernel as pk
from parmarkov import products as pr
from parmarkov.enumeration import all_subobjects
from parmarkov.finmarkov import ShapeError
from parmarkov.lawsuite import GenConfig, Generator
from parmarkov.parkernel import Subobject

from helpers import HALF, N, Q, part

X = fm.obj("a", "b", name="X")
Y = fm.obj("u", "v", name="Y")


def cone(g, h):
    disc = pk.par_discard(X, Q)
    legs = {(0, 1): pk.par_tensor(g, h), (0,): pk.par_tensor(g, disc), (1,): pk.par_tensor(disc, h)}
    return pr.LaxCone(fm.tensor(X, X), [Y, Y], legs, Q)


G = part(X, Y, Q, {"a": {"u": HALF, "v": HALF}})
H = part(X, Y, Q, {"b": {"v": 1}})


def test_empty_family_is_unit_identity():
    assert pr.tensor_family([], Q) == pk.par_identity(fm.UNIT, Q)
    with pytest.raises(ShapeError):
        pr.tensor_family([])


def test_family_matches_iterated_tensor():
    assert pr.tensor_family([G, H, G]) == pk.par_tensor(pk.par_tensor(G, H), G)


def test_cone_of_single_map_is_strict():
    g = pk.par_tensor(G, H)
    legs = {f: pk.par_compose(pr.marginalization([Y, Y], (0, 1), f, Q), g) for f in pr.subsets(2)}
    c = pr.LaxCone(g.source, [Y, Y], legs, Q)
    assert pr.is_lax_cone(c)[0] and pr.is_strict_cone(c)
    assert pr.lax_induced_map(c) == g


def test_two_map_family_is_lax_not_strict():
    c = cone(G, H)
    assert pr.is_lax_cone(c) == (True, None)
    assert not pr.is_strict_cone(c)
    induced = pr.lax_induced_map(c)
    assert induced.dom.elements == (("a", "b"),)
    assert induced == pk.par_tensor(G, H)


def test_incompatible_family_is_not_lax():
    other = part(X, Y, Q, {"a": {"u": 1}})
    disc = pk.par_discard(X, Q)
    legs = {(0, 1): pk.par_tensor(G, H), (0,): pk.par_tensor(other, disc), (1,): pk.par_tensor(disc, H)}
    c = pr.LaxCone(fm.tensor(X, X), [Y, Y], legs, Q)
    ok, witness = pr.is_lax_cone(c)
    assert not ok and witness == ((0, 1), (0,))
    with pytest.raises(pr.NotALaxCone):
        pr.lax_induced_map(c)


def test_induced_map_domain_is_meet_of_legs():
    # legs with domains D ⊗ A and D ⊗ E give D ⊗ E
    d = Subobject.of(X, [("a",)])
    e_ = Subobject.of(X, [("b",)])
    c = cone(G, H)
    legs = c.all_legs()
    assert legs[(0,)].dom == pk.subobject_tensor(d, Subobject.full(X))
    assert pr.lax_induced_map(c).dom == pk.subobject_tensor(d, e_)


def test_synthesized_empty_leg():
    c = cone(G, H)
    empty_leg = c.leg(())
    # the join of the two singleton marginals is defined wherever either leg is
    assert empty_leg.dom.element_set == {("a", "a"), ("a", "b"), ("b", "b")}


def test_marginalization_shapes():
    objs = [X, Y, fm.obj(0, 1)]
    m = pr.marginalization(objs, (0, 1, 2), (0, 2), Q)
    assert m.source == fm.tensor(X, Y, fm.obj(0, 1))
    assert m(("a", "v", 1)) == {("a", 1): 1}
    with pytest.raises(ShapeError):
        pr.marginalization(objs, (0,), (1,), Q)


def test_infinite_copy_marginals():
    g = Generator(GenConfig(seed=4, instance="qnonneg", max_object_size=3))
    for _ in range(10):
        u = g.parmap(g.object(), g.object())
        assert pr.infinite_copy(u, 0) == pk.par_compose(pk.par_discard(u.target, Q), u)
        for k in range(1, 4):
            big = pr.infinite_copy(u, k)
            assert big.dom == u.dom
            for f in pr.subsets(k):
                marg = pk.par_compose(pr.marginalization([u.target] * k, range(k), f, Q), big)
                assert marg == pr.copy_power(u, len(f))


def test_infinite_copy_of_coin():
    coin = fm.obj("H", "T")
    u = pk.lift(fm.Kernel(fm.obj("pt"), coin, Q, {("pt",): {("H",): HALF, ("T",): HALF}}))
    big = pr.infinite_copy(u, 3)
    assert big(("pt",)) == {w: Fraction(1, 8) for w in itertools.product("HT", repeat=3)}


def test_meets_agree_with_pullbacks():
    x = fm.obj(0, 1, 2)
    subs = list(all_subobjects(x))
    for a, b in itertools.product(subs, repeat=2):
        assert pr.subobject_meet([a, b]) == pr.subobject_meet_by_pullback([a, b], N)
    assert pr.subobject_meet([], x) == Subobject.full(x)


def test_box_cutout():
    two = fm.obj(0, 1)
    assert pr.box_cutout_check([Subobject.of(two, [(0,)]), Subobject.full(two), Subobject.empty(two)])
    box = pr.box_subobject([Subobject.of(two, [(0,)]), Subobject.of(two, [(1,)])], [0])
    assert box.element_set == {(0, 0), (0, 1)}
