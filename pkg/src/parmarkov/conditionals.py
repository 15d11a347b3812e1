"""Conditionals ``f_{|X} : X ⊗ A → Y`` of kernels ``f : A → X ⊗ Y``.

Available for the rational and Boolean instances.  Off the support of the
``X``-marginal a conditional is not unique; :class:`ConditionalPolicy` fixes
the tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import finmarkov as fm
from . import parkernel as pk
from .finmarkov import FinObject, Kernel, ShapeError
from .parkernel import ParMap, Subobject
from .semiring import UnsupportedInstance


@dataclass(frozen=True)
class ConditionalPolicy:
    """Column used where the ``X``-marginal vanishes: ``first`` or ``last`` target element."""

    fallback: str = "first"

    def column(self, target: FinObject, semiring) -> dict:
        if not target.elements:
            raise ShapeError("no fallback column into an empty object")
        y = target.elements[0] if self.fallback == "first" else target.elements[-1]
        return {y: semiring.one()}


DEFAULT_POLICY = ConditionalPolicy()


def split_target(target: FinObject, x_arity: int = 1) -> tuple[FinObject, FinObject]:
    """Factor a tensor target into its first ``x_arity`` coordinates and the rest."""
    if target.arity < x_arity + 1 or x_arity < 1:
        raise ShapeError(f"target of arity {target.arity} is not a binary tensor X ⊗ Y")
    xs = fm.tensor(*(target.coordinate(k) for k in range(x_arity)))
    ys = fm.tensor(*(target.coordinate(k) for k in range(x_arity, target.arity)))
    if fm.tensor(xs, ys) != target:
        raise ShapeError(f"target {target} is not a full product of its coordinates")
    return xs, ys


def _require_supported(sr):
    if sr.tag not in ("qnonneg", "bool"):
        raise UnsupportedInstance(f"conditionals unsupported for the {sr.tag} instance")


def base_conditional(f: Kernel, x_arity: int = 1, policy: ConditionalPolicy = DEFAULT_POLICY) -> Kernel:
    """Conditional of ``f : A → X ⊗ Y`` with respect to the output ``X``."""
    sr = f.semiring
    _require_supported(sr)
    xobj, yobj = split_target(f.target, x_arity)
    fallback = policy.column(yobj, sr)
    cols = {}
    for a, col in f.columns.items():
        fibres: dict = {}
        for xy, w in col.items():
            fibres.setdefault(xy[:x_arity], {})[xy[x_arity:]] = w
        for x in xobj.elements:
            fibre = fibres.get(x)
            if not fibre:
                cols[x + a] = dict(fallback)
            elif sr.tag == "bool":
                cols[x + a] = dict(fibre)
            else:
                mass = sr.total(fibre.values())
                cols[x + a] = {y: w / mass for y, w in fibre.items()}
    return Kernel(fm.tensor(xobj, f.source), yobj, sr, cols, check=False)


def par_conditional(u: ParMap, x_arity: int = 1, policy: ConditionalPolicy = DEFAULT_POLICY) -> ParMap:
    """``(X ⊗ dom(u); base conditional of u.ker)``."""
    _require_supported(u.semiring)
    xobj, _ = split_target(u.target, x_arity)
    c = base_conditional(u.ker, x_arity, policy)
    source = fm.tensor(xobj, u.source)
    return ParMap(source, Subobject(source, c.source.elements), c)


def conditional_rhs(u: ParMap, c: ParMap, x_arity: int = 1) -> ParMap:
    """``(id_X ⊗ c) ∘ (cop_X ⊗ id_A) ∘ (u_X ⊗ id_A) ∘ cop_A`` evaluated in Par."""
    sr = u.semiring
    xobj, yobj = split_target(u.target, x_arity)
    a = u.source
    if c.source != fm.tensor(xobj, a) or c.target != yobj:
        raise ShapeError("conditional has the wrong shape")
    u_x = pk.par_compose(pk.lift(fm.projection(u.target, range(x_arity), sr)), u)
    return pk.par_compose_all(
        pk.par_copy(a, sr),
        pk.par_tensor(u_x, pk.par_identity(a, sr)),
        pk.par_tensor(pk.par_copy(xobj, sr), pk.par_identity(a, sr)),
        pk.par_tensor(pk.par_identity(xobj, sr), c),
    )


def verify_conditional(u: ParMap, c: ParMap, x_arity: int = 1) -> bool:
    """Exact check of the defining equation of a conditional."""
    return conditional_rhs(u, c, x_arity) == u


def support_restriction(u: ParMap, x_arity: int = 1) -> Subobject:
    """Pairs ``(x, a)`` with ``a ∈ dom(u)`` and ``u_X(x|a) ≠ 0``.

    Two conditionals of ``u`` must agree after restricting to this subset.
    """
    xobj, _ = split_target(u.target, x_arity)
    source = fm.tensor(xobj, u.source)
    pairs = []
    for a, col in u.ker.columns.items():
        for x in {xy[:x_arity] for xy in col}:
            pairs.append(x + a)
    return Subobject.of(source, pairs)
