"""Evaluate terms against a file environment."""

from __future__ import annotations

from .. import conditionals as cd
from .. import parkernel as pk
from .. import products as pr
from .. import representability as rp
from ..parkernel import ParMap
from .fileformat import Env
from .syntax import ICopy, Name, Seq, Structural, Ten, Unary


class EvalError(ValueError):
    pass


def evaluate(term, env: Env) -> ParMap:
    sr = env.semiring
    if isinstance(term, Name):
        if term.name not in env.maps:
            raise EvalError(f"unbound name {term.name!r}")
        return env.maps[term.name]
    if isinstance(term, Seq):
        return pk.par_compose(evaluate(term.second, env), evaluate(term.first, env))
    if isinstance(term, Ten):
        return pk.par_tensor(evaluate(term.left, env), evaluate(term.right, env))
    if isinstance(term, Structural):
        objs = [env.resolve_obj(o, sr) for o in term.objs]
        if term.op == "id":
            return pk.par_identity(objs[0], sr)
        if term.op == "copy":
            return pk.par_copy(objs[0], sr)
        if term.op == "discard":
            return pk.par_discard(objs[0], sr)
        if term.op == "swap":
            return pk.par_swap(objs[0], objs[1], sr)
        if term.op == "delta":
            return pk.lift(rp.delta(objs[0], sr))
        return pk.lift(rp.samp(objs[0], sr))
    if isinstance(term, Unary):
        u = evaluate(term.arg, env)
        if term.op == "dom":
            return pk.par_dom(u)
        if term.op == "cond":
            factors = u.target.factors
            x_arity = factors[0].arity if factors else 1
            return cd.par_conditional(u, x_arity)
        if term.op == "sharp":
            return rp.sharp(u)
        return rp.pushforward(u)
    if isinstance(term, ICopy):
        return pr.infinite_copy(evaluate(term.arg, env), term.k)
    raise EvalError(f"not a term: {term!r}")
