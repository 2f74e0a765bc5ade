"""Judgment inference for the CwF calculus.

A :class:`Kernel` bundles the typechecker with the normalizer it delegates
side conditions to.  Both share memo tables keyed on interned terms, so a
kernel should be treated as a per-task object; the module-level helpers
create a fresh one per call.
"""

from __future__ import annotations

import os
import sys
import threading
from dataclasses import dataclass
from functools import wraps
from typing import Callable, Optional, Union

from .nbe import EMPTY_ENV, BaseVar, NbE, RCtx, ResourceExhausted, SubV, VNeu, NVar, VPi, VSigma, VU
from .syntax import (
    Comp, El, Ext, Fst, GenSub, GenTm, GenTy, Id, P1, PairSub, Pi, Sigma,
    StarSub, StarTm, StarTy, SubT, SubTm, Term, Univ, print_term,
    star_head_ok, vr, wk,
)

DEFAULT_FUEL = 10 ** 6
DEFAULT_SEARCH_DEPTH = 8


def default_fuel() -> int:
    env = os.environ.get("PARAMKIT_FUEL")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"PARAMKIT_FUEL must be an integer, got {env!r}") from None
        if n <= 0:
            raise ValueError("PARAMKIT_FUEL must be positive")
        return n
    return DEFAULT_FUEL


# -- deep recursion -----------------------------------------------------------

_STACK_BYTES = 1 << 29
_local = threading.local()


def deep(fn: Callable) -> Callable:
    """Run ``fn`` on a thread with a large stack unless already on one.

    Normalization and translation are structurally recursive over terms whose
    depth reaches the thousands in the tower.
    """

    @wraps(fn)
    def wrapper(*args, **kwargs):
        if getattr(_local, "deep", False):
            return fn(*args, **kwargs)
        box: dict = {}

        def run():
            _local.deep = True
            try:
                box["value"] = fn(*args, **kwargs)
            except BaseException as e:  # re-raised on the caller's thread
                box["error"] = e

        old = threading.stack_size()
        threading.stack_size(_STACK_BYTES)
        try:
            t = threading.Thread(target=run, name="paramkit-deep")
            t.start()
        finally:
            threading.stack_size(old)
        t.join()
        if "error" in box:
            raise box["error"]
        return box["value"]

    return wrapper


if sys.getrecursionlimit() < 200_000:
    sys.setrecursionlimit(200_000)


# -- judgments ----------------------------------------------------------------

@dataclass(frozen=True)
class CtxOk:
    def show(self) -> str:
        return "ctx"


@dataclass(frozen=True)
class TyIn:
    ctx: Term

    def show(self) -> str:
        return f"type in {_short(self.ctx)}"


@dataclass(frozen=True)
class SubBetween:
    dom: Term
    cod: Term

    def show(self) -> str:
        return f"sub {_short(self.dom)} -> {_short(self.cod)}"


@dataclass(frozen=True)
class TmOf:
    ctx: Term
    ty: Term

    def show(self) -> str:
        return f"term in {_short(self.ctx)} of type {_short(self.ty)}"


Judgment = Union[CtxOk, TyIn, SubBetween, TmOf]


def _short(t: Term, limit: int = 400) -> str:
    if t.size > 5000:
        return f"<{t.tag} term of size {t.size}>"
    s = print_term(t)
    return s if len(s) <= limit else s[: limit - 3] + "..."


ERROR_KINDS = (
    "SortMismatch", "ContextMismatch", "TypeMismatch", "NotAPi",
    "NotASigma", "NotAUniverseElement", "IllFormedStar",
)


class TypeCheckError(Exception):
    def __init__(self, kind: str, message: str, expected: str = "", actual: str = "", path=()):
        assert kind in ERROR_KINDS, kind
        self.kind = kind
        self.message = message
        self.expected = expected
        self.actual = actual
        self.path = tuple(path)
        super().__init__(message)

    def __str__(self) -> str:
        where = "/".join(map(str, self.path)) or "root"
        s = f"{self.kind} at {where}: {self.message}"
        if self.expected or self.actual:
            s += f" (expected {self.expected}; got {self.actual})"
        return s


# -- kernel -------------------------------------------------------------------

class CtxInfo:
    """Normal form of a context together with its identity environment."""
    __slots__ = ("syn", "base", "entries", "env", "rc")

    def __init__(self, syn, base, entries, env, rc):
        self.syn, self.base, self.entries, self.env, self.rc = syn, base, entries, env, rc


class HeadInfo:
    __slots__ = ("canon", "ctx", "ty")

    def __init__(self, canon: Term, ctx: CtxInfo, ty: Optional[Term]):
        self.canon, self.ctx, self.ty = canon, ctx, ty


class Kernel:
    def __init__(self, fuel: Optional[int] = None, search_depth: int = DEFAULT_SEARCH_DEPTH,
                 trace: bool = False):
        self.fuel = default_fuel() if fuel is None else fuel
        self.search_depth = search_depth
        self.nbe = NbE(self, self.fuel)
        if trace:
            self.nbe.rules = {}
        self._judg: dict[Term, Judgment] = {}
        self._ctx: dict[Term, CtxInfo] = {}
        self._heads: dict[Term, HeadInfo] = {}
        self._idnf: dict[Term, Term] = {}
        self._nf: dict[tuple, Term] = {}
        self.star_memo: dict[Term, Term] = {}
        self._active = 0

    # fuel is a per-operation budget; nested calls share the outer budget
    def _enter(self):
        if self._active == 0:
            self.nbe.steps = 0
        self._active += 1

    def _leave(self):
        self._active -= 1

    @property
    def steps(self) -> int:
        return self.nbe.steps

    # -- contexts and heads -----------------------------------------------------

    def ctx_info(self, ctx: Term) -> CtxInfo:
        hit = self._ctx.get(ctx)
        if hit is not None:
            return hit
        # iterate over the telescope so long contexts do not recurse deeply
        chain = []
        c = ctx
        while c.tag == "ext" and c not in self._ctx:
            chain.append(c)
            c = c.args[0]
        if c.tag == "ext":
            info = self._ctx[c]
        else:
            if c.tag == "empty":
                info = CtxInfo(c, c, (), EMPTY_ENV, RCtx(c, 0))
            elif c.tag == "genctx":
                info = CtxInfo(c, c, (), SubV(BaseVar(c), ()), RCtx(c, 0))
            else:
                raise TypeCheckError("SortMismatch", f"not a context: {c.tag}")
            self._ctx[c] = info
        for e in reversed(chain):
            a = e.args[1]
            tyv = self.nbe.eval_ty(a, info.env)
            a_nf = self.nbe.rb_ty(tyv, info.rc)
            syn = Ext(info.syn, a_nf)
            n = info.rc.n
            info = CtxInfo(syn, info.base, info.entries + (a_nf,),
                           info.env.extend(VNeu(NVar(n), tyv)), RCtx(syn, n + 1))
            self._ctx[e] = info
        return info

    def identity_nf(self, ctx_nf: Term) -> Term:
        hit = self._idnf.get(ctx_nf)
        if hit is None:
            info = self.ctx_info(ctx_nf)
            hit = self.nbe.rb_sub(info.env, info, info.rc)
            self._idnf[ctx_nf] = hit
        return hit

    def head_info(self, h: Term) -> HeadInfo:
        hit = self._heads.get(h)
        if hit is not None:
            return hit
        tag = h.tag
        if tag == "genty":
            ci = self.ctx_info(h.args[1])
            info = HeadInfo(GenTy(h.args[0], ci.syn), ci, None)
        elif tag == "gentm":
            ci = self.ctx_info(h.args[1])
            a_nf = self.nbe.rb_ty(self.nbe.eval_ty(h.args[2], ci.env), ci.rc)
            info = HeadInfo(GenTm(h.args[0], ci.syn, a_nf), ci, h.args[2])
        elif tag == "gensub":
            ci = self.ctx_info(h.args[1])
            info = HeadInfo(GenSub(h.args[0], ci.syn, self.ctx_info(h.args[2]).syn), ci, None)
        elif tag == "starctx":
            info = HeadInfo(h, self.ctx_info(h.args[0]), None)
        elif tag == "starty":
            j = self.typecheck(h)
            info = HeadInfo(StarTy(self.head_info(h.args[0]).canon), self.ctx_info(j.ctx), None)
        elif tag in ("starsub", "startm"):
            j = self.typecheck(h)
            inner = self.head_info(h.args[0]).canon
            canon = StarSub(inner) if tag == "starsub" else StarTm(inner)
            info = HeadInfo(canon, self.ctx_info(j.ctx), j.ty)
        else:
            raise ValueError(f"not an atomic head: {tag}")
        self._heads[h] = info
        return info

    # -- normalization ------------------------------------------------------------

    def nf_ty(self, a: Term, ctx: Term) -> Term:
        key = ("ty", a, ctx)
        hit = self._nf.get(key)
        if hit is None:
            ci = self.ctx_info(ctx)
            hit = self.nbe.rb_ty(self.nbe.eval_ty(a, ci.env), ci.rc)
            self._nf[key] = hit
        return hit

    def nf_tm(self, t: Term, ctx: Term, ty: Term) -> Term:
        key = ("tm", t, ctx, ty)
        hit = self._nf.get(key)
        if hit is None:
            ci = self.ctx_info(ctx)
            tyv = self.nbe.eval_ty(ty, ci.env)
            hit = self.nbe.rb_tm(tyv, self.nbe.eval_tm(t, ci.env), ci.rc)
            self._nf[key] = hit
        return hit

    def nf_sub(self, s: Term, dom: Term, cod: Term) -> Term:
        key = ("sub", s, dom, cod)
        hit = self._nf.get(key)
        if hit is None:
            ci = self.ctx_info(dom)
            hit = self.nbe.rb_sub(self.nbe.eval_sub(s, ci.env), self.ctx_info(cod), ci.rc)
            self._nf[key] = hit
        return hit

    def normal(self, t: Term, j: Optional[Judgment] = None) -> Term:
        """Normal form of ``t`` at judgment ``j`` (inferred when omitted)."""
        self._enter()
        try:
            if j is None:
                j = self.typecheck(t)
            if isinstance(j, CtxOk):
                return self.ctx_info(t).syn
            if isinstance(j, TyIn):
                return self.nf_ty(t, j.ctx)
            if isinstance(j, SubBetween):
                return self.nf_sub(t, j.dom, j.cod)
            return self.nf_tm(t, j.ctx, j.ty)
        finally:
            self._leave()

    def ctx_eq(self, a: Term, b: Term) -> bool:
        return a is b or self.ctx_info(a).syn is self.ctx_info(b).syn

    def ty_eq(self, a: Term, b: Term, ctx: Term) -> bool:
        return a is b or self.nf_ty(a, ctx) is self.nf_ty(b, ctx)

    def judgment_eq(self, j1: Judgment, j2: Judgment) -> bool:
        if type(j1) is not type(j2):
            return False
        if isinstance(j1, CtxOk):
            return True
        if isinstance(j1, TyIn):
            return self.ctx_eq(j1.ctx, j2.ctx)
        if isinstance(j1, SubBetween):
            return self.ctx_eq(j1.dom, j2.dom) and self.ctx_eq(j1.cod, j2.cod)
        return self.ctx_eq(j1.ctx, j2.ctx) and self.ty_eq(j1.ty, j2.ty, j1.ctx)

    # -- star ---------------------------------------------------------------------

    def star(self, t: Term) -> Term:
        from .param import star_in
        return star_in(self, t)

    def judgment_of_star(self, t: Term, j: Optional[Judgment] = None) -> Judgment:
        """The judgment ``star(t)`` must inhabit, given ``t : j``."""
        if j is None:
            j = self.typecheck(t)
        if isinstance(j, CtxOk):
            return TyIn(t)
        if isinstance(j, TyIn):
            gg = Ext(j.ctx, self.star(j.ctx))
            return TyIn(Ext(gg, SubT(t, wk(gg))))
        if isinstance(j, SubBetween):
            gg = Ext(j.dom, self.star(j.dom))
            return TmOf(gg, SubT(self.star(j.cod), Comp(t, wk(gg))))
        gg = Ext(j.ctx, self.star(j.ctx))
        w = wk(gg)
        return TmOf(gg, SubT(self.star(j.ty), PairSub(Id(gg), SubTm(t, w), SubT(j.ty, w))))

    # -- typechecking -------------------------------------------------------------

    def typecheck(self, t: Term) -> Judgment:
        hit = self._judg.get(t)
        if hit is not None:
            return hit
        self._enter()
        try:
            j = self._infer(t)
        finally:
            self._leave()
        self._judg[t] = j
        return j

    def _child(self, t: Term, i: int) -> Judgment:
        try:
            return self.typecheck(t.args[i])
        except TypeCheckError as e:
            e.path = (i,) + e.path
            raise

    def _ctx_of(self, t, i, sort_msg) -> Term:
        j = self._child(t, i)
        if not isinstance(j, TyIn):
            raise TypeCheckError("SortMismatch", sort_msg)
        return j.ctx

    def _need_ctx(self, a: Term, b: Term, what: str, path=()) -> None:
        if not self.ctx_eq(a, b):
            raise TypeCheckError("ContextMismatch", what, _short(a), _short(b), path)

    def _need_ty(self, a: Term, b: Term, ctx: Term, what: str, path=()) -> None:
        if not self.ty_eq(a, b, ctx):
            raise TypeCheckError("TypeMismatch", what, _short(a), _short(b), path)

    def _view(self, ty: Term, ctx: Term, want: str, kind: str, path) -> tuple[Term, Term]:
        """Domain and family of a Σ- or Π-type, peeling syntax where possible."""
        tag = ty.tag
        if tag == want:
            return ty.args[0], ty.args[1]
        if tag == "subT" and ty.args[0].tag == want:
            a, b = ty.args[0].args
            s = ty.args[1]
            as_ = SubT(a, s)
            ext = Ext(ctx, as_)
            return as_, SubT(b, PairSub(Comp(s, wk(ext)), vr(ext), a))
        code = {"sigma": "sigmau", "pi": "piu"}[want]
        if tag == "el" and ty.args[0].tag == code:
            s, u = ty.args[0].args
            return El(s), El(u)
        ci = self.ctx_info(ctx)
        v = self.nbe.eval_ty(ty, ci.env)
        cls = VSigma if want == "sigma" else VPi
        if not isinstance(v, cls):
            raise TypeCheckError(kind, f"expected a {want} type", want, _short(self.nbe.rb_ty(v, ci.rc)), path)
        nf = self.nbe.rb_ty(v, ci.rc)
        return nf.args[0], nf.args[1]

    def _need_univ(self, ty: Term, ctx: Term, path) -> None:
        if ty.tag == "univ":
            return
        ci = self.ctx_info(ctx)
        v = self.nbe.eval_ty(ty, ci.env)
        if not isinstance(v, VU):
            raise TypeCheckError("NotAUniverseElement", "expected an element of the universe",
                                 "univ", _short(self.nbe.rb_ty(v, ci.rc)), path)

    def _infer(self, t: Term) -> Judgment:
        tag = t.tag
        a = t.args
        if tag in ("empty", "genctx"):
            return CtxOk()
        if tag == "ext":
            self._child(t, 0)
            g = self._ctx_of(t, 1, "ext expects a type")
            self._need_ctx(a[0], g, "type lives in a different context", (1,))
            return CtxOk()
        if tag in ("top", "univ", "genty"):
            self._child(t, len(a) - 1)
            return TyIn(a[-1])
        if tag == "subT":
            d = self._ctx_of(t, 0, "subT expects a type")
            sj = self._child(t, 1)
            self._need_ctx(d, sj.cod, "substitution codomain differs from the type's context", (1,))
            return TyIn(sj.dom)
        if tag in ("sigma", "pi"):
            g = self._ctx_of(t, 0, f"{tag} expects a type")
            g2 = self._ctx_of(t, 1, f"{tag} expects a type")
            self._need_ctx(Ext(g, a[0]), g2, "family must live in the extended context", (1,))
            return TyIn(g)
        if tag == "el":
            j = self._child(t, 0)
            self._need_univ(j.ty, j.ctx, (0,))
            return TyIn(j.ctx)
        if tag in ("starctx", "starty", "starsub", "startm"):
            if not star_head_ok(t):
                raise TypeCheckError("IllFormedStar", f"{tag} wraps the composite head {a[0].tag}")
            j = self._child(t, 0)
            return self.judgment_of_star(a[0], j)
        if tag == "comp":
            s = self._child(t, 0)
            n = self._child(t, 1)
            self._need_ctx(s.dom, n.cod, "composable substitutions must meet", (1,))
            return SubBetween(n.dom, s.cod)
        if tag == "id":
            self._child(t, 0)
            return SubBetween(a[0], a[0])
        if tag == "eps":
            self._child(t, 0)
            return SubBetween(a[0], Term("empty"))
        if tag == "pairsub":
            s = self._child(t, 0)
            d = self._ctx_of(t, 2, "pairsub annotation must be a type")
            self._need_ctx(s.cod, d, "annotation lives outside the codomain", (2,))
            m = self._child(t, 1)
            self._need_ctx(m.ctx, s.dom, "component lives in a different context", (1,))
            self._need_ty(SubT(a[2], a[0]), m.ty, s.dom, "component has the wrong type", (1,))
            return SubBetween(s.dom, Ext(d, a[2]))
        if tag == "p1":
            s = self._child(t, 0)
            if s.cod.tag != "ext":
                raise TypeCheckError("ContextMismatch", "p1 needs a substitution into an extended context",
                                     "ext", s.cod.tag, (0,))
            return SubBetween(s.dom, s.cod.args[0])
        if tag == "gensub":
            self._child(t, 1)
            self._child(t, 2)
            return SubBetween(a[1], a[2])
        if tag == "subt":
            m = self._child(t, 0)
            s = self._child(t, 1)
            self._need_ctx(m.ctx, s.cod, "substitution codomain differs from the term's context", (1,))
            return TmOf(s.dom, SubT(m.ty, a[1]))
        if tag == "p2":
            s = self._child(t, 0)
            if s.cod.tag != "ext":
                raise TypeCheckError("ContextMismatch", "p2 needs a substitution into an extended context",
                                     "ext", s.cod.tag, (0,))
            return TmOf(s.dom, SubT(s.cod.args[1], P1(a[0])))
        if tag == "tt":
            self._child(t, 0)
            return TmOf(a[0], Term("top", a[0]))
        if tag == "topu":
            self._child(t, 0)
            return TmOf(a[0], Univ(a[0]))
        if tag in ("fst", "snd"):
            m = self._child(t, 0)
            dom, fam = self._view(m.ty, m.ctx, "sigma", "NotASigma", (0,))
            if tag == "fst":
                return TmOf(m.ctx, dom)
            return TmOf(m.ctx, SubT(fam, PairSub(Id(m.ctx), Fst(a[0]), dom)))
        if tag == "pairtm":
            s = self._child(t, 0)
            g2 = self._ctx_of(t, 2, "pairtm annotation must be a type")
            self._need_ctx(Ext(s.ctx, s.ty), g2, "family must live in the extended context", (2,))
            m = self._child(t, 1)
            self._need_ctx(m.ctx, s.ctx, "components live in different contexts", (1,))
            self._need_ty(SubT(a[2], PairSub(Id(s.ctx), a[0], s.ty)), m.ty, s.ctx,
                          "second component has the wrong type", (1,))
            return TmOf(s.ctx, Sigma(s.ty, a[2]))
        if tag == "app":
            m = self._child(t, 0)
            dom, fam = self._view(m.ty, m.ctx, "pi", "NotAPi", (0,))
            return TmOf(Ext(m.ctx, dom), fam)
        if tag == "lam":
            m = self._child(t, 0)
            if m.ctx.tag != "ext":
                raise TypeCheckError("ContextMismatch", "lam needs a body in an extended context",
                                     "ext", m.ctx.tag, (0,))
            return TmOf(m.ctx.args[0], Pi(m.ctx.args[1], m.ty))
        if tag in ("sigmau", "piu"):
            s = self._child(t, 0)
            self._need_univ(s.ty, s.ctx, (0,))
            m = self._child(t, 1)
            self._need_ctx(m.ctx, Ext(s.ctx, El(a[0])), "code family must live over El of the domain", (1,))
            self._need_univ(m.ty, m.ctx, (1,))
            return TmOf(s.ctx, Univ(s.ctx))
        if tag == "gentm":
            self._child(t, 1)
            g = self._ctx_of(t, 2, "gentm type slot must be a type")
            self._need_ctx(a[1], g, "declared type lives in a different context", (2,))
            return TmOf(a[1], a[2])
        raise TypeCheckError("SortMismatch", f"unknown tag {tag}")


def judgment_text(j: Judgment) -> str:
    """``(ctx)``, ``(ty Γ)``, ``(sub Γ Δ)`` or ``(tm Γ A)`` with terms in the textual format."""
    from .syntax import render
    if isinstance(j, CtxOk):
        return "(ctx)"
    if isinstance(j, TyIn):
        return f"(ty {render(j.ctx)})"
    if isinstance(j, SubBetween):
        return f"(sub {render(j.dom)} {render(j.cod)})"
    return f"(tm {render(j.ctx)} {render(j.ty)})"


def judgment_json(j: Judgment) -> dict:
    from .syntax import render
    if isinstance(j, CtxOk):
        return {"judgment": "ctx"}
    if isinstance(j, TyIn):
        return {"judgment": "ty", "ctx": render(j.ctx)}
    if isinstance(j, SubBetween):
        return {"judgment": "sub", "dom": render(j.dom), "cod": render(j.cod)}
    return {"judgment": "tm", "ctx": render(j.ctx), "ty": render(j.ty)}


# -- module-level API -----------------------------------------------------------

@deep
def typecheck(t: Term, kernel: Optional[Kernel] = None) -> Judgment:
    return (kernel or Kernel()).typecheck(t)


@deep
def judgment_of_star(t: Term, j: Optional[Judgment] = None, kernel: Optional[Kernel] = None) -> Judgment:
    k = kernel or Kernel()
    return k.judgment_of_star(t, j)


__all__ = [
    "CtxOk", "TyIn", "SubBetween", "TmOf", "Judgment", "TypeCheckError",
    "Kernel", "typecheck", "judgment_of_star", "ResourceExhausted", "deep",
    "DEFAULT_FUEL", "DEFAULT_SEARCH_DEPTH", "default_fuel", "judgment_text", "judgment_json",
]
