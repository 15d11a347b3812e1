"""Exhaustive enumeration of kernels and partial maps for the finite instances.

Only ``bool`` and ``nat`` have finitely many kernels between finite carriers
(``nat`` kernels are exactly the functions).
"""

from __future__ import annotations

import itertools

from .finmarkov import FinObject, Kernel
from .parkernel import Subobject, _raw
from .semiring import Semiring, UnsupportedInstance


def columns(target: FinObject, sr: Semiring) -> list[dict]:
    """Every normalized column over ``target``."""
    one = sr.one()
    els = target.elements
    if sr.tag == "nat":
        return [{y: one} for y in els]
    if sr.tag == "bool":
        out = []
        for r in range(1, len(els) + 1):
            for combo in itertools.combinations(els, r):
                out.append({y: one for y in combo})
        return out
    raise UnsupportedInstance(f"cannot enumerate kernels over {sr.tag}")


def all_kernels(source: FinObject, target: FinObject, sr: Semiring):
    cols = columns(target, sr)
    for choice in itertools.product(cols, repeat=len(source)):
        yield Kernel(source, target, sr, dict(zip(source.elements, choice)), check=False)


def all_parmaps(source: FinObject, target: FinObject, sr: Semiring, copyable_only: bool = False):
    """Every partial map ``source → target``; optionally only the copyable ones."""
    cols = columns(target, sr)
    if copyable_only:
        cols = [c for c in cols if len(c) == 1]
    options = [None] + cols
    for choice in itertools.product(options, repeat=len(source)):
        yield _raw(source, target, sr, {x: c for x, c in zip(source.elements, choice) if c is not None})


def all_subobjects(x: FinObject):
    els = x.elements
    for r in range(len(els) + 1):
        for combo in itertools.combinations(els, r):
            yield Subobject(x, combo)


def all_endo_relations(x: FinObject, sr: Semiring):
    """Boolean endo-relations as partial maps: ``x`` is in the domain iff its image is nonempty."""
    return all_parmaps(x, x, sr)
