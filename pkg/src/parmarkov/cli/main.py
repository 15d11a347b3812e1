"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys

from .. import idempotents as idem
from .. import lawsuite as ls
from .. import products as pr
from .. import representability as rp
from ..finmarkov import Kernel, format_element
from ..parkernel import ParMap, Subobject
from ..semiring import SemiringError, get_semiring
from .evaluate import EvalError, evaluate
from .fileformat import Env, _literal_key, declarations, element_key, kernel_text, map_text, object_text, parse_file
from .substochastic import compose_substochastic
from .syntax import ParseError, Seq, parse


def _compact(e) -> str:
    return format_element(e).replace(" ", "")


def _records(name: str, u: ParMap) -> list[str]:
    sr = u.semiring
    dom = "{" + ",".join(_compact(x) for x in u.dom.elements) + "}"
    out = [f"kind=parmap name={name} source={object_text(u.source).replace(' ', '')} "
           f"target={object_text(u.target).replace(' ', '')} semiring={sr.tag} dom={dom}"]
    for x in u.dom.elements:
        for y, w in u.ker.sorted_column(x):
            out.append(f"kind=entry name={name} x={_compact(x)} y={_compact(y)} weight={sr.format(w)}")
    return out


def _matrix_records(name: str, k: Kernel) -> list[str]:
    sr = k.semiring
    out = [f"kind=matrix name={name} semiring={sr.tag}"]
    for x in k.source.elements:
        total = sr.total(k.columns.get(x, {}).values())
        out.append(f"kind=mass name={name} x={_compact(x)} mass={sr.format(total)}")
        for y, w in k.sorted_column(x) if k.columns.get(x) else ():
            out.append(f"kind=entry name={name} x={_compact(x)} y={_compact(y)} weight={sr.format(w)}")
    return out


def _show_map(args, name: str, u: ParMap):
    if args.format == "machine":
        print("\n".join(_records(name, u)))
    else:
        print(map_text(name, u))


def _load(args) -> Env:
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    sr = get_semiring(args.semiring) if args.semiring else None
    return parse_file(text, sr)


def cmd_eval(args) -> int:
    env = _load(args)
    _show_map(args, "result", evaluate(parse(args.term), env))
    return 0


def cmd_compare(args) -> int:
    env = _load(args)
    term = parse(args.term)
    if not isinstance(term, Seq):
        raise EvalError("compare-substochastic expects a sequential composite 'a ; b'")
    u, v = evaluate(term.first, env), evaluate(term.second, env)
    par = evaluate(term, env)
    sub = compose_substochastic(v, u)
    agree = all(par(x) == sub.columns[x] for x in u.source.elements)
    if args.format == "machine":
        print("\n".join(_records("par", par)))
        print("\n".join(_matrix_records("substochastic", sub)))
        print(f"kind=verdict agree={'yes' if agree else 'no'}")
    else:
        print(map_text("par", par))
        print(kernel_text("substochastic", sub))
        print("composites agree" if agree else "composites differ")
    return 0


def cmd_check(args) -> int:
    names = list(ls.LAWS) if args.law == "all" else [args.law]
    for n in names:
        if n not in ls.LAWS:
            raise EvalError(f"unknown law {n!r}; known: {', '.join(ls.LAWS)}")
    instances = [args.semiring] if args.semiring else ["qnonneg", "bool", "nat"]
    failed = False
    for inst in instances:
        cfg = ls.GenConfig(seed=args.seed, samples=args.samples, max_object_size=args.max_size,
                           instance=inst, jobs=args.jobs)
        for n in names:
            r = ls.check(n, cfg, engine=args.engine)
            failed |= not r.passed
            status = "pass" if r.passed else "fail"
            if args.format == "machine":
                print(f"kind=law law={n} semiring={inst} engine={args.engine} status={status} "
                      f"checked={r.checked} skipped={r.skipped} failures={r.failures}")
            else:
                print(f"{n} [{inst}, {args.engine}]: {status} ({r.checked} cases, {r.failures} failures)")
            if not r.passed:
                print(f"  {r.message}")
                named = [(f"m{i}", u) for i, u in enumerate(r.counterexample)]
                for line in declarations(named).splitlines():
                    print(f"  {line}")
    return 1 if failed else 0


def cmd_split(args) -> int:
    env = _load(args)
    if args.name not in env.maps:
        raise EvalError(f"unbound name {args.name!r}")
    u = env.maps[args.name]
    s = idem.split_idempotent(u)
    flags = idem.classify_idempotent(u)
    if args.format == "machine":
        print(f"kind=split name={args.name} through={len(s.through)}")
        print("\n".join(_records("retraction", s.retraction)))
        print("\n".join(_records("section", s.section)))
        print(f"kind=flags balanced={flags.balanced} static={flags.static} strong={flags.strong}")
    else:
        print(f"object S = {{{', '.join(_compact(e) for e in s.through.elements)}}}")
        print(map_text("retraction", s.retraction))
        print(map_text("section", s.section))
        print(f"balanced={flags.balanced} static={flags.static} strong={flags.strong}")
    return 0


def _build_algebra(env: Env, decl) -> rp.PartialAlgebraCandidate:
    carrier = env.objects[decl.carrier]
    sr = decl.semiring
    pa = rp.dist_object(carrier, sr)
    table = {element_key(e): e for e in pa.carrier.elements}
    atoms = {element_key(e): e for e in carrier.elements}

    def resolve(lit, tbl, what):
        key = _literal_key(lit)
        if key not in tbl:
            raise EvalError(f"{what} {lit!r} is not valid for algebra {decl.name}")
        return tbl[key]

    if decl.domain is None:
        dom = Subobject.full(pa.carrier)
    else:
        dom = Subobject.of(pa.carrier, [resolve(lit, table, "distribution") for lit in decl.domain])
    one = sr.one()
    cols = {}
    for d_lit, a_lit, _ in decl.action:
        cols[resolve(d_lit, table, "distribution")] = {resolve(a_lit, atoms, "element"): one}
    if set(cols) != dom.element_set:
        raise EvalError(f"action of algebra {decl.name} does not cover exactly its domain")
    return rp.PartialAlgebraCandidate(carrier, dom, Kernel(dom.as_object, carrier, sr, cols))


def cmd_check_algebra(args) -> int:
    env = _load(args)
    if not env.algebras:
        raise EvalError("the file declares no algebra")
    failed = False
    for decl in env.algebras:
        report = rp.check_partial_algebra(_build_algebra(env, decl))
        failed |= not report.passed
        for r in report.results:
            status = "pass" if r.passed else "fail"
            if args.format == "machine":
                w = "" if r.witness is None else f" witness={_compact(r.witness)}"
                print(f"kind=condition algebra={decl.name} condition={r.condition} status={status}{w}")
            else:
                print(f"{decl.name}: {r.condition}: {status}" + (f" ({r.detail})" if r.detail else ""))
    return 1 if failed else 0


def cmd_lax_induce(args) -> int:
    env = _load(args)
    if not env.cones:
        raise EvalError("the file declares no cone")
    failed = False
    for decl in env.cones:
        apex = env.resolve_obj(decl.apex)
        objects = [env.resolve_obj(o) for o in decl.objects]
        legs = {k: evaluate(t, env) for k, t in decl.legs.items()}
        cone = pr.LaxCone(apex, objects, legs, env.semiring)
        ok, witness = pr.is_lax_cone(cone)
        if not ok:
            failed = True
            print(f"{decl.name}: not a lax cone: legs {set(witness[0]) or '{}'} → {set(witness[1]) or '{}'}")
            continue
        g = pr.lax_induced_map(cone)
        strict = pr.is_strict_cone(cone)
        if args.format == "machine":
            print(f"kind=cone name={decl.name} lax=True strict={strict}")
        else:
            print(f"{decl.name}: lax cone ({'strict' if strict else 'lax but not strict'})")
        _show_map(args, f"{decl.name}_induced", g)
    return 1 if failed else 0


def cmd_dist_object(args) -> int:
    env = _load(args)
    if args.object not in env.objects:
        raise EvalError(f"unknown object {args.object!r}")
    x = env.objects[args.object]
    p = rp.dist_object(x, env.semiring)
    labels = [_compact(e) if len(e) != 1 else format_element(e) for e in p.carrier.elements]
    if args.format == "machine":
        print(f"kind=distobject base={args.object} semiring={env.semiring.tag} size={len(labels)}")
        for i, lab in enumerate(labels):
            print(f"kind=element index={i} label={lab.replace(' ', '')}")
    else:
        print(f"object P({args.object}) = {{{', '.join(labels)}}}")
        print(f"# {len(labels)} distributions over {env.semiring.tag}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--semiring", choices=["qnonneg", "bool", "nat"], default=None,
                        help="instance (default: the one the file uses, else qnonneg)")
    common.add_argument("--format", choices=["text", "machine"], default="text")

    p = argparse.ArgumentParser(prog="parmarkov", description="Partial Markov kernels on finite sets.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate a term against a file")
    e.add_argument("file")
    e.add_argument("term")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", parents=[common], help="run a law of the law suite, or all of them")
    c.add_argument("law")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--max-size", type=int, default=4)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--engine", choices=sorted(ls.ENGINES), default="par",
                   help="'substochastic' runs the deliberately wrong composition")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("compare-substochastic", parents=[common],
                       help="show a composite next to its sub-stochastic counterpart")
    s.add_argument("file")
    s.add_argument("term")
    s.set_defaults(func=cmd_compare)

    sp = sub.add_parser("split", parents=[common], help="split a declared idempotent")
    sp.add_argument("file")
    sp.add_argument("name")
    sp.set_defaults(func=cmd_split)

    a = sub.add_parser("check-algebra", parents=[common], help="check the declared partial algebras")
    a.add_argument("file")
    a.set_defaults(func=cmd_check_algebra)

    lx = sub.add_parser("lax-induce", parents=[common], help="induced map of the declared cones")
    lx.add_argument("file")
    lx.set_defaults(func=cmd_lax_induce)

    d = sub.add_parser("dist-object", parents=[common], help="list the distribution object of a declared object")
    d.add_argument("file")
    d.add_argument("object")
    d.set_defaults(func=cmd_dist_object)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"{exc.origin or getattr(args, 'file', 'input')}: {exc}", file=sys.stderr)
    except (EvalError, SemiringError, idem.NotIdempotent, idem.SplitFailure, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
