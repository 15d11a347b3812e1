from fractions import Fraction

import pytest

from parmarkov import conditionals as cd
from parmarkov import finmarkov as fm
from parmarkov import parkernel as pk
from parmarkov.finmarkov import ShapeError
from parmarkov.lawsuite import GenConfig, Generator
from parmarkov.parkernel import ParMap
from parmarkov.semiring import UnsupportedInstance

from helpers import HALF, B, N, Q

PT = fm.obj("pt")
BIT = fm.obj(0, 1)
XY = fm.tensor(BIT, BIT)


def diagonal(sr, w):
    return pk.lift(fm.Kernel(PT, XY, sr, {("pt",): {(0, 0): w, (1, 1): w}}))


def test_rational_diagonal():
    u = diagonal(Q, HALF)
    c = cd.par_conditional(u)
    assert c(((0, "pt"))) == {(0,): 1}
    assert c(((1, "pt"))) == {(1,): 1}
    assert cd.verify_conditional(u, c)


def test_boolean_fibre():
    u = pk.lift(fm.Kernel(PT, XY, B, {("pt",): {(0, 0): True, (1, 1): True}}))
    c = cd.par_conditional(u)
    assert c((0, "pt")) == {(0,): True}
    assert cd.verify_conditional(u, c)


def test_nat_is_unsupported():
    u = pk.lift(fm.Kernel(PT, XY, N, {("pt",): {(0, 0): 1}}))
    with pytest.raises(UnsupportedInstance, match="conditionals unsupported"):
        cd.par_conditional(u)


def test_null_fibre_uses_first_element():
    u = pk.lift(fm.Kernel(PT, XY, Q, {("pt",): {(0, 1): 1}}))
    c = cd.par_conditional(u)
    assert c((1, "pt")) == {(0,): 1}
    last = cd.par_conditional(u, policy=cd.ConditionalPolicy("last"))
    assert last((1, "pt")) == {(1,): 1}
    assert cd.verify_conditional(u, last)


def test_domains():
    u = diagonal(Q, HALF)
    assert cd.par_conditional(u).dom.is_full()
    empty = pk.empty_map(PT, XY, Q)
    c = cd.par_conditional(empty)
    assert len(c.dom) == 0
    assert cd.verify_conditional(empty, c)


def test_perturbed_fibre_is_rejected():
    u = diagonal(Q, HALF)
    c = cd.par_conditional(u)
    cols = dict(c.ker.columns)
    cols[(0, "pt")] = {(0,): HALF, (1,): HALF}
    bad = ParMap(c.source, c.dom, fm.Kernel(c.dom.as_object, c.target, Q, cols))
    assert not cd.verify_conditional(u, bad)


def test_agreement_on_support_only():
    g = Generator(GenConfig(seed=11, instance="qnonneg", max_object_size=3))
    for _ in range(50):
        a, x, y = g.objects(3)
        u = g.parmap(a, fm.tensor(x, y))
        first = cd.par_conditional(u)
        last = cd.par_conditional(u, policy=cd.ConditionalPolicy("last"))
        assert cd.verify_conditional(u, last)
        s = cd.support_restriction(u)
        assert pk.restrict_to(first, s) == pk.restrict_to(last, s)


def test_multi_coordinate_split():
    u = pk.lift(fm.Kernel(PT, fm.tensor(BIT, BIT, BIT), Q, {("pt",): {(0, 1, 1): Fraction(1, 3), (0, 1, 0): Fraction(2, 3)}}))
    c = cd.par_conditional(u, x_arity=2)
    assert c((0, 1, "pt")) == {(1,): Fraction(1, 3), (0,): Fraction(2, 3)}
    assert cd.verify_conditional(u, c, x_arity=2)


def test_target_must_be_binary():
    with pytest.raises(ShapeError):
        cd.par_conditional(pk.lift(fm.identity(BIT, Q)))
