"""Sub-stochastic composition, kept apart from the partial-map engine.

Partial maps are embedded as sub-normalized matrices (a zero column off the
domain) and composed by the plain Chapman–Kolmogorov sum.  The result is for
side-by-side display and for the deliberately wrong law-suite engine only.
"""

from __future__ import annotations

from ..finmarkov import Kernel, ShapeError
from ..parkernel import ParMap
from ..semiring import InstanceMismatch, UnsupportedInstance


def compose_substochastic(v: ParMap, u: ParMap) -> Kernel:
    """``v ∘ u`` as sub-normalized matrices; columns may be empty or sum below one."""
    require_comparable(u)
    return chapman_kolmogorov(v, u)


def chapman_kolmogorov(v: ParMap, u: ParMap) -> Kernel:
    if u.semiring != v.semiring:
        raise InstanceMismatch(f"{u.semiring.tag} map composed with {v.semiring.tag} map")
    if u.target != v.source:
        raise ShapeError(f"cannot compose: target {u.target} differs from source {v.source}")
    sr = u.semiring
    plus, times, zero = sr.plus, sr.times, sr.zero()
    vcols = v.ker.columns
    cols = {}
    for x in u.source.elements:
        acc = {}
        for y, w in u(x).items():
            for z, c in vcols.get(y, {}).items():
                acc[z] = plus(acc.get(z, zero), times(c, w))
        cols[x] = {z: w for z, w in acc.items() if w != zero}
    return Kernel(u.source, v.target, sr, cols, check=False)


def mass(k: Kernel, x):
    return k.semiring.total(k.columns[x].values())


def require_comparable(u: ParMap):
    if u.semiring.tag not in ("qnonneg", "bool"):
        raise UnsupportedInstance(f"sub-stochastic comparison needs qnonneg or bool, not {u.semiring.tag}")
