"""``paramkit`` command line.

Exit codes: 0 success, 1 a check failed, 2 usage or input error,
3 resource exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import appendix as appx
from .equality import equal, normalize
from .gatlab import (
    FiniteReflexiveGraph, ModelError, SizeLimit, Span,
    adjunction_check, commute_pushout_check, endo_right_adjoint, graph_right_adjoint, hom_enum,
    model_from_json, monoid_units, pushout,
)
from .gatlab.pushout import hom_from_json
from .nbe import ResourceExhausted
from .param import star_in
from .syntax import TermError, read, render
from .tower import DEFAULT_MAX_DIM, tower
from .typecheck import Kernel, TypeCheckError, deep, judgment_json, judgment_text

OK, FAILED, USAGE, EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _natural(text: str) -> int:
    return 0 if text.strip() == "0" else _positive(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="paramkit", description="CwF kernel, parametricity translation and finite-model lab.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_, fuel=True, json_=True):
        c = sub.add_parser(name, help=help_)
        if fuel:
            c.add_argument("--fuel", type=_positive, help="normalization step budget")
        if json_:
            c.add_argument("--json", action="store_true", help="machine-readable output")
        return c

    c = cmd("check", "print the judgment of a term")
    c.add_argument("file")
    c = cmd("norm", "print the normal form of a term")
    c.add_argument("file")
    c.add_argument("--trace", action="store_true")
    c = cmd("eq", "decide judgmental equality of two terms")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--trace", action="store_true")
    c.add_argument("--search-depth", type=_natural)
    c = cmd("star", "parametricity translation of a term")
    c.add_argument("file")
    c = cmd("appendix", "verify that the translation respects every axiom")
    c.add_argument("--group", choices=appx.GROUPS)
    c.add_argument("--mutate", metavar="ID")
    c.add_argument("--search-depth", type=_natural)
    c.add_argument("--trace", action="store_true")
    c.add_argument("--list", action="store_true", help="print the catalogue instead of checking it")
    c = cmd("tower", "iterate the translation on a context generator")
    c.add_argument("--dim", type=_positive, default=DEFAULT_MAX_DIM)
    c.add_argument("--flatten", action="store_true")
    c = cmd("adjoint", "right adjoint of a forgetful functor on a finite model", fuel=False)
    c.add_argument("theory", choices=("monoid", "graph", "endo"))
    c.add_argument("file")
    c.add_argument("--depth", type=_positive)
    c = cmd("pushout", "pushout of a span of (reflexive) graphs", fuel=False)
    c.add_argument("kind", choices=("graph", "rgraph"))
    for f in ("d", "c1", "c2", "f1", "f2"):
        c.add_argument(f)
    c.add_argument("--verify-commute", action="store_true")
    c = cmd("hom", "enumerate homomorphisms between finite models", fuel=False)
    c.add_argument("theory", choices=("monoid", "group", "graph", "rgraph", "endo"))
    c.add_argument("a")
    c.add_argument("b")
    return p


# -- output helpers ---------------------------------------------------------------------

class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, human: str, data) -> None:
        if self.as_json:
            print(json.dumps(data, indent=2, sort_keys=False))
        else:
            print(human)


def _load(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    try:
        return read(text)
    except TermError as e:
        raise UsageError(f"{path}: {e}") from None


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from None


def _model(path: str, theory: str):
    try:
        return model_from_json(_load_json(path), theory)
    except (ModelError, KeyError, TypeError) as e:
        raise UsageError(f"{path}: not a valid {theory} model: {e}") from None


def _kernel(args, trace: bool = False) -> Kernel:
    try:
        kw = {"fuel": getattr(args, "fuel", None), "trace": trace}
        if getattr(args, "search_depth", None) is not None:
            kw["search_depth"] = args.search_depth
        return Kernel(**kw)
    except ValueError as e:
        raise UsageError(str(e)) from None


# -- kernel commands -----------------------------------------------------------------------

def _check(args, out: _Out) -> int:
    t = _load(args.file)
    j = _kernel(args).typecheck(t)
    out.emit(judgment_text(j), judgment_json(j))
    return OK


def _norm(args, out: _Out) -> int:
    t = _load(args.file)
    k = _kernel(args, args.trace)
    nf = normalize(t, kernel=k)
    trace = [f"{r} x{n}" for r, n in sorted((k.nbe.rules or {}).items())] if args.trace else []
    human = render(nf.term) + ("".join(f"\n  {line}" for line in trace) if trace else "")
    data = {"normal": render(nf.term), **judgment_json(nf.judgment), "steps": nf.steps}
    if args.trace:
        data["trace"] = trace
    out.emit(human, data)
    return OK


def _eq(args, out: _Out) -> int:
    a, b = _load(args.a), _load(args.b)
    k = _kernel(args, args.trace)
    v = equal(a, b, kernel=k)
    human = f"{'equal' if v.equal else 'not equal'} ({v.method}, {v.steps} steps)"
    if args.trace:
        human += "".join(f"\n  {line}" for line in v.trace)
    data = {"equal": v.equal, "method": v.method, "steps": v.steps}
    if args.trace:
        data["trace"] = v.trace
    out.emit(human, data)
    return OK if v.equal else FAILED


def _star(args, out: _Out) -> int:
    t = _load(args.file)
    k = _kernel(args)
    j = k.typecheck(t)
    s = star_in(k, t)
    js = k.typecheck(s)
    want = k.judgment_of_star(t, j)
    ok = k.judgment_eq(js, want)
    out.emit(f"{render(s)}\n: {judgment_text(js)}",
             {"star": render(s), **judgment_json(js), "well_typed": ok})
    return OK if ok else FAILED


def _appendix(args, out: _Out) -> int:
    if args.list:
        if args.mutate:
            raise UsageError("--list and --mutate cannot be combined")
        axs = appx.catalogue(args.group)
        rows = [{"id": ax.id, "statement": ax.statement, "derived": ax.derived,
                 "mutant": ax.mutant is not None} for ax in axs]
        human = [f"catalogue v{appx.CATALOGUE_VERSION}: {len(axs)} instances"]
        human += [f"  {r['id']:<20} {r['statement']}" for r in rows]
        out.emit("\n".join(human), {"version": appx.CATALOGUE_VERSION, "axioms": rows})
        return OK
    if args.mutate is not None:
        try:
            appx.by_id(args.mutate).mutated()
        except KeyError:
            raise UsageError(f"unknown axiom id {args.mutate!r}") from None
        except ValueError as e:
            raise UsageError(str(e)) from None
    k = _kernel(args)  # validates PARAMKIT_FUEL early
    results = appx.run_appendix(args.group, args.mutate, fuel=k.fuel, search_depth=args.search_depth)
    if out.as_json:
        print(json.dumps([r.as_json() for r in results], indent=2))
    else:
        lines = [f"catalogue v{appx.CATALOGUE_VERSION}"]
        lines += [f"{'id':<20} {'status':<19} {'method':<15} {'steps':>7}"]
        for r in results:
            lines.append(f"{r.id:<20} {r.status.upper():<19} {r.method:<15} {r.steps:>7}")
            if r.message:
                lines.append(f"    {r.message}")
            if args.trace:
                lines.extend(f"    {t}" for t in r.trace)
        npass = sum(r.passed for r in results)
        lines.append(f"{npass}/{len(results)} pass")
        print("\n".join(lines))
    if any(r.status == "resource-exhausted" for r in results):
        return EXHAUSTED
    return OK if all(r.passed for r in results) else FAILED


def _tower(args, out: _Out) -> int:
    k = _kernel(args)
    rep = tower(args.dim, flatten=args.flatten, kernel=k)
    levels = []
    human = []
    for lv in rep.levels:
        levels.append({"dim": lv.dim, "ambient": render(lv.ambient), "body": render(lv.body),
                       "telescope_len": lv.telescope_len, "flattened_len": lv.flattened_len})
        extra = f"  flattened_len={lv.flattened_len}" if lv.flattened_len is not None else ""
        human.append(f"dim {lv.dim}: telescope_len={lv.telescope_len}{extra}  "
                     f"ambient size={lv.ambient.size}")
        human.append(f"  body: {render(lv.body)}")
    out.emit("\n".join(human), levels)
    return OK


# -- gat-lab commands ---------------------------------------------------------------------

def _graph_json(g) -> dict:
    """JSON for graphs whose vertices may be tuples, as for the loop adjoint."""
    base = g.graph if isinstance(g, FiniteReflexiveGraph) else g
    names = {v: v if isinstance(v, (str, int)) else ":".join(map(str, v)) for v in base.vertices}
    d = {"vertices": [names[v] for v in base.vertices],
         "edges": {f"{names[u]},{names[v]}": list(es) for (u, v), es in base.edges.items()}}
    if isinstance(g, FiniteReflexiveGraph):
        d["refl"] = {str(names[v]): e for v, e in g.refl.items()}
    return d


def _adjoint(args, out: _Out) -> int:
    if args.depth is not None and args.theory != "endo":
        raise UsageError("--depth only applies to the endo adjoint")
    if args.theory == "monoid":
        m = _model(args.file, "monoid")
        u = monoid_units(m)
        d = u.to_json()
        d["inverse"] = {str(x): u.carrier[u.inverse[i]] for i, x in enumerate(u.carrier)}
        out.emit(f"units: order {u.order}, elements {list(u.carrier)}", d)
        return OK
    if args.theory == "graph":
        g = _model(args.file, "graph")
        c = graph_right_adjoint(g)
        d = _graph_json(c)
        out.emit(f"C(G): {len(c.vertices)} vertices, {c.graph.edge_count} edges\n"
                 + json.dumps(d), d)
        return OK
    raw = _load_json(args.file)
    depth = args.depth or 32
    if "map" not in raw:
        if "carrier" not in raw:
            raise UsageError(f"{args.file}: expected {{carrier: [...]}} or an endo model")
        c = endo_right_adjoint(raw["carrier"], depth)
        out.emit(f"C(X) = streams over {list(c.base)} observed to depth {depth}, with the shift",
                 {"base": list(c.base), "depth": depth})
        return OK
    y = _model(args.file, "endo")
    rep = adjunction_check("endo", y, y.carrier, depth=depth)
    out.emit(f"endo adjunction on {len(y.carrier)} points, depth {depth}: "
             f"{'ok' if rep.ok else 'FAILED'}; {rep.rhs_count} maps g, {rep.lhs_count} transposes"
             + "".join(f"\n  {f}" for f in rep.failures), rep.as_json())
    return OK if rep.ok else FAILED


def _pushout(args, out: _Out) -> int:
    if args.verify_commute and args.kind != "rgraph":
        raise UsageError("--verify-commute needs rgraph models")
    theory = args.kind
    d, c1, c2 = (_model(p, theory) for p in (args.d, args.c1, args.c2))
    try:
        f1 = hom_from_json(_load_json(args.f1), d, c1)
        f2 = hom_from_json(_load_json(args.f2), d, c2)
        span = Span(d, c1, c2, f1, f2)
        po = pushout(args.kind, span)[0]
    except ModelError as e:
        raise UsageError(str(e)) from None
    data = {"pushout": _graph_json(po)}
    g = po.graph if isinstance(po, FiniteReflexiveGraph) else po
    human = f"pushout: {len(g.vertices)} vertices, {g.edge_count} edges\n{json.dumps(data['pushout'])}"
    code = OK
    if args.verify_commute:
        rep = commute_pushout_check(span)
        data["commute"] = rep.as_json()
        human += f"\nU(pushout) ≅ pushout(U): {'yes' if rep.ok else 'NO'}"
        if rep.witness is not None:
            human += f"\n  witness: {rep.as_json()['witness']['vertices']}"
        code = OK if rep.ok else FAILED
    out.emit(human, data)
    return code


def _hom(args, out: _Out) -> int:
    a, b = _model(args.a, args.theory), _model(args.b, args.theory)
    homs = hom_enum(args.theory, a, b)
    if args.theory in ("graph", "rgraph"):
        rows = [{"vertices": {str(k): str(v) for k, v in h.vmap},
                 "edges": {str(k[2]): str(v) for k, v in h.emap}} for h in homs]
    else:
        rows = [{str(k): v for k, v in h.labelled(a, b).items()} for h in homs]
    out.emit(f"{len(homs)} homomorphisms" + "".join(f"\n  {json.dumps(r)}" for r in rows),
             {"count": len(homs), "homs": rows})
    return OK


COMMANDS = {"check": _check, "norm": _norm, "eq": _eq, "star": _star, "appendix": _appendix,
            "tower": _tower, "adjoint": _adjoint, "pushout": _pushout, "hom": _hom}


def _fail(as_json: bool, message: str, code: int) -> int:
    msg = " ".join(message.split())
    if as_json:
        print(json.dumps({"error": msg}))
    print(f"paramkit: error: {msg}", file=sys.stderr)
    return code


@deep
def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail(as_json, str(e), USAGE)
    except SystemExit as e:  # --help
        return OK if not e.code else USAGE
    out = _Out(getattr(args, "json", False))
    try:
        return COMMANDS[args.cmd](args, out)
    except UsageError as e:
        return _fail(out.as_json, str(e), USAGE)
    except TypeCheckError as e:
        return _fail(out.as_json, str(e), FAILED)
    except (ResourceExhausted, SizeLimit) as e:
        return _fail(out.as_json, str(e), EXHAUSTED)
    except ValueError as e:
        return _fail(out.as_json, str(e), USAGE)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
