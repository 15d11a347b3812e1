"""Brute-force pullback universality for the ``bool`` and ``nat`` instances.

A square::

    P --top--> A
    |          |
   left      right
    v          v
    C --bot--> D

is a pullback when every cone ``(q : T → C, r : T → A)`` with
``bot ∘ q = right ∘ r`` factors through ``P`` by exactly one ``h``.  Kernels
act column by column, so a cone from a ``T``-point probe is a ``T``-tuple of
one-point cones and its mediating maps are tuples of one-point mediators:
one-point probes decide universality for every probe size.  ``probe_size=2``
enumerates two-point probes literally anyway, as a cross-check.

Columns are bitmasks over the target's element order; the image of every
mask under a kernel is tabulated once, so each candidate costs O(1).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from . import finmarkov as fm
from .finmarkov import Kernel, ShapeError
from .semiring import UnsupportedInstance


@dataclass
class PullbackVerdict:
    is_pullback: bool
    cones_checked: int = 0
    witness: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.is_pullback


def _image_table(k: Kernel) -> list[int]:
    """``table[m]`` = union of the supports of the columns selected by mask ``m``."""
    tidx = k.target.index
    cols = [sum(1 << tidx[y] for y in k.columns[x]) for x in k.source.elements]
    n = len(cols)
    table = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = m & -m
        table[m] = table[m ^ low] | cols[low.bit_length() - 1]
    return table


def _column_masks(n: int, tag: str) -> list[int]:
    if tag == "nat":
        return [1 << b for b in range(n)]
    return list(range(1, 1 << n))


def is_pullback(top: Kernel, left: Kernel, right: Kernel, bottom: Kernel, probe_size: int = 1) -> PullbackVerdict:
    sr = top.semiring
    if sr.tag not in ("bool", "nat"):
        raise UnsupportedInstance(f"brute-force universality needs a finite instance, not {sr.tag}")
    if top.source != left.source or top.target != right.source or left.target != bottom.source or right.target != bottom.target:
        raise ShapeError("the four kernels do not form a square")
    if fm.compose(right, top) != fm.compose(bottom, left):
        return PullbackVerdict(False, reason="square does not commute")

    top_t, left_t = _image_table(top), _image_table(left)
    right_t, bot_t = _image_table(right), _image_table(bottom)
    hs = _column_masks(len(top.source), sr.tag)
    qs = _column_masks(len(left.target), sr.tag)
    rs = _column_masks(len(top.target), sr.tag)

    mediators = Counter((left_t[h], top_t[h]) for h in hs)
    by_image: dict[int, list[int]] = {}
    for r in rs:
        by_image.setdefault(right_t[r], []).append(r)
    cones = [(q, r) for q in qs for r in by_image.get(bot_t[q], ())]

    if probe_size == 1:
        for cone in cones:
            if mediators[cone] != 1:
                return PullbackVerdict(False, len(cones), witness=(cone, mediators[cone]),
                                       reason="cone without a unique mediating map")
        return PullbackVerdict(True, len(cones))

    tuple_mediators = Counter(
        tuple(zip(*((left_t[h], top_t[h]) for h in combo)))
        for combo in itertools.product(hs, repeat=probe_size)
    )
    checked = 0
    for combo in itertools.product(cones, repeat=probe_size):
        key = tuple(zip(*combo))
        checked += 1
        if tuple_mediators[key] != 1:
            return PullbackVerdict(False, checked, witness=(combo, tuple_mediators[key]),
                                   reason="cone without a unique mediating map")
    return PullbackVerdict(True, checked)


def pullback_square(f: Kernel, t_sub) -> tuple[Kernel, Kernel, Kernel, Kernel]:
    """The square pulling the subset ``t_sub`` of ``f.target`` back along ``f``."""
    from .parkernel import pullback_det_mono

    sr = f.semiring
    s_sub = pullback_det_mono(f, t_sub)
    top = fm.corestrict(fm.restrict(f, s_sub.as_object), t_sub.as_object)
    left = s_sub.inclusion(sr)
    right = t_sub.inclusion(sr)
    return top, left, right, f
