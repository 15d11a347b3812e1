"""Small builders shared by the unit tests."""

from fractions import Fraction

from parmarkov import finmarkov as fm
from parmarkov import parkernel as pk
from parmarkov.semiring import get_semiring

Q, B, N = get_semiring("qnonneg"), get_semiring("bool"), get_semiring("nat")
HALF = Fraction(1, 2)


def e(*labels):
    return tuple(labels)


def kern(src, tgt, sr, rows):
    """Kernel from ``{label: {label: weight}}`` on atomic objects."""
    return fm.Kernel(src, tgt, sr, {(x,): {(y,): sr.coerce(w) for y, w in col.items()} for x, col in rows.items()})


def part(src, tgt, sr, rows):
    return pk.partial(src, tgt, sr, {(x,): {(y,): sr.coerce(w) for y, w in col.items()} for x, col in rows.items()})


def coin_fixture(sr):
    one = fm.obj("pt", name="One")
    coin = fm.obj("H", "T", name="Coin")
    out = fm.obj("a", name="Out")
    w = HALF if sr is Q else True
    p = pk.lift(kern(one, coin, sr, {"pt": {"H": w, "T": w}}))
    f = part(coin, out, sr, {"H": {"a": 1 if sr is not B else True}})
    return one, coin, out, p, f
