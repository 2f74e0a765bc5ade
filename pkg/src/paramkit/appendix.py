"""Catalogue of the calculus' equations and the star-preservation checker.

Each :class:`AxiomInstance` instantiates one equation with fresh generators.
``verify_axiom`` translates both sides, checks that the translations inhabit
the judgment ``judgment_of_star`` predicts, and decides their equality.
Falsifiable equations carry a mutant right-hand side (same judgment, wrong
value) used as a negative control.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .equality import equal
from .param import star_in
from .syntax import (
    App, Comp, El, Empty, Eps, Ext, Fst, GenCtx, GenSub, GenTm, GenTy, Id, Lam,
    P1, P2, PairSub, PairTm, Pi, PiU, Sigma, SigmaU, Snd, SubT, SubTm, Term,
    Top, TopU, Tt, Univ, render, vr, wk,
)
from .typecheck import DEFAULT_FUEL, Judgment, Kernel, ResourceExhausted, TypeCheckError, deep

CATALOGUE_VERSION = "1"
GROUPS = ("sub", "ty", "unit", "sigma", "pi", "univ", "derived")


@dataclass(frozen=True)
class AxiomInstance:
    id: str
    lhs: Term
    rhs: Term
    judgment: Judgment
    statement: str
    mutant: Optional[Term] = None
    derived: bool = False

    @property
    def group(self) -> str:
        return self.id.split(".", 1)[0]

    def mutated(self) -> "AxiomInstance":
        if self.mutant is None:
            raise ValueError(f"{self.id} has no mutant (its two sides are forced equal by typing)")
        return AxiomInstance(self.id, self.lhs, self.mutant, self.judgment,
                             self.statement + "  [mutated]", None, self.derived)


@dataclass
class CheckResult:
    id: str
    status: str  # "pass", "fail" or "resource-exhausted"
    method: str
    steps: int
    lhs_star: str = ""
    rhs_star: str = ""
    message: str = ""
    seconds: float = 0.0
    trace: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_json(self) -> dict:
        return {"id": self.id, "status": self.status, "steps": self.steps, "method": self.method}


def lift(s: Term, a: Term, dom: Term) -> Term:
    """``(s ∘ w, v) : Sub (dom, A[s]) (Δ, A)`` for ``s : Sub dom Δ``."""
    ext = Ext(dom, SubT(a, s))
    return PairSub(Comp(s, wk(ext)), vr(ext), a)


def _build() -> list[AxiomInstance]:
    k = Kernel(fuel=DEFAULT_FUEL)  # the catalogue does not depend on PARAMKIT_FUEL
    G, D, T, W = GenCtx("G"), GenCtx("D"), GenCtx("T"), GenCtx("W")
    out: list[AxiomInstance] = []

    def add(ident, lhs, rhs, statement, mutant=None, derived=False):
        j = k.typecheck(lhs)
        assert k.judgment_eq(j, k.typecheck(rhs)), ident
        if mutant is not None:
            assert k.judgment_eq(j, k.typecheck(mutant)), ident
        out.append(AxiomInstance(ident, lhs, rhs, j, statement, mutant, derived))

    # substitution calculus
    s_tw, n_dt, d_gd = GenSub("s3", T, W), GenSub("n3", D, T), GenSub("d3", G, D)
    add("sub.assoc", Comp(Comp(s_tw, n_dt), d_gd), Comp(s_tw, Comp(n_dt, d_gd)),
        "(s o n) o d = s o (n o d)", Comp(s_tw, Comp(n_dt, GenSub("d4", G, D))))
    s, s2 = GenSub("s", G, D), GenSub("s2", G, D)
    add("sub.idl", Comp(Id(D), s), s, "id o s = s", s2)
    add("sub.idr", Comp(s, Id(G)), s, "s o id = s", s2)
    add("sub.eps", GenSub("e", G, Empty()), Eps(G), "s = eps")
    A = GenTy("A", D)
    t, t2 = GenTm("t", G, SubT(A, s)), GenTm("t2", G, SubT(A, s))
    add("sub.p1-beta", P1(PairSub(s, t, A)), s, "p1 (s, t) = s", s2)
    add("sub.p2-beta", P2(PairSub(s, t, A)), t, "p2 (s, t) = t", t2)
    se, se2 = GenSub("q", G, Ext(D, A)), GenSub("q2", G, Ext(D, A))
    add("sub.pair-eta", PairSub(P1(se), P2(se), A), se, "(p1 s, p2 s) = s", se2)
    n = GenSub("n", T, G)
    add("sub.pair-comp", Comp(PairSub(s, t, A), n), PairSub(Comp(s, n), SubTm(t, n), A),
        "(s, t) o n = (s o n, t[n])", PairSub(Comp(s, n), SubTm(t2, n), A))

    # types
    A2 = GenTy("A2", D)
    add("ty.sub-comp", SubT(A, Comp(s, n)), SubT(SubT(A, s), n), "A[s o n] = A[s][n]",
        SubT(SubT(A2, s), n))
    add("ty.sub-id", SubT(A, Id(D)), A, "A[id] = A", A2)

    # unit
    add("unit.eta", GenTm("x", G, Top(G)), Tt(G), "x = tt")
    add("unit.top-sub", SubT(Top(D), s), Top(G), "top[s] = top", Univ(G))
    add("unit.tt-sub", SubTm(Tt(D), s), Tt(G), "tt[s] = tt")

    # products
    AG = GenTy("Ag", G)
    B, B2 = GenTy("Bg", Ext(G, AG)), GenTy("Bg2", Ext(G, AG))
    a, a2 = GenTm("a", G, AG), GenTm("a2", G, AG)
    bty = SubT(B, PairSub(Id(G), a, AG))
    b, b2 = GenTm("b", G, bty), GenTm("b2", G, bty)
    add("sigma.beta1", Fst(PairTm(a, b, B)), a, "(a, b).1 = a", a2)
    add("sigma.beta2", Snd(PairTm(a, b, B)), b, "(a, b).2 = b", b2)
    p, p2 = GenTm("p", G, Sigma(AG, B)), GenTm("p2", G, Sigma(AG, B))
    add("sigma.eta", PairTm(Fst(p), Snd(p), B), p, "(p.1, p.2) = p", p2)
    r = GenSub("r", D, G)
    lr = lift(r, AG, D)
    add("sigma.sub", SubT(Sigma(AG, B), r), Sigma(SubT(AG, r), SubT(B, lr)),
        "(Sigma A B)[r] = Sigma A[r] B[r o w, v]", Sigma(SubT(AG, r), SubT(B2, lr)))
    add("sigma.pair-sub", SubTm(PairTm(a, b, B), r), PairTm(SubTm(a, r), SubTm(b, r), SubT(B, lr)),
        "(a, b)[r] = (a[r], b[r])", PairTm(SubTm(a, r), SubTm(b2, r), SubT(B, lr)))

    # functions
    body, body2 = GenTm("u", Ext(G, AG), B), GenTm("u2", Ext(G, AG), B)
    add("pi.beta", App(Lam(body)), body, "app (lam t) = t", body2)
    f, f2 = GenTm("f", G, Pi(AG, B)), GenTm("f2", G, Pi(AG, B))
    add("pi.eta", Lam(App(f)), f, "lam (app f) = f", f2)
    add("pi.sub", SubT(Pi(AG, B), r), Pi(SubT(AG, r), SubT(B, lr)),
        "(Pi A B)[r] = Pi A[r] B[r o w, v]", Pi(SubT(AG, r), SubT(B2, lr)))
    add("pi.lam-sub", SubTm(Lam(body), r), Lam(SubTm(body, lr)),
        "(lam t)[r] = lam (t[r o w, v])", Lam(SubTm(body2, lr)))

    # universe
    c, c2 = GenTm("c", G, Univ(G)), GenTm("c2", G, Univ(G))
    e, e2 = GenTm("e", Ext(G, El(c)), Univ(Ext(G, El(c)))), GenTm("e2", Ext(G, El(c)), Univ(Ext(G, El(c))))
    lc = lift(r, El(c), D)
    add("univ.sub", SubT(Univ(G), r), Univ(D), "U[r] = U", Top(D))
    add("univ.el-sub", SubT(El(c), r), El(SubTm(c, r)), "(El c)[r] = El (c[r])", El(SubTm(c2, r)))
    add("univ.topu-sub", SubTm(TopU(G), r), TopU(D), "topU[r] = topU", GenTm("c3", D, Univ(D)))
    add("univ.sigmau-sub", SubTm(SigmaU(c, e), r), SigmaU(SubTm(c, r), SubTm(e, lc)),
        "(SigmaU c e)[r] = SigmaU c[r] e[r o w, v]", SigmaU(SubTm(c, r), SubTm(e2, lc)))
    add("univ.piu-sub", SubTm(PiU(c, e), r), PiU(SubTm(c, r), SubTm(e, lc)),
        "(PiU c e)[r] = PiU c[r] e[r o w, v]", PiU(SubTm(c, r), SubTm(e2, lc)))
    add("univ.el-topu", El(TopU(G)), Top(G), "El topU = top", Univ(G))
    add("univ.el-sigmau", El(SigmaU(c, e)), Sigma(El(c), El(e)), "El (SigmaU c e) = Sigma (El c) (El e)",
        Pi(El(c), El(e)))
    add("univ.el-piu", El(PiU(c, e)), Pi(El(c), El(e)), "El (PiU c e) = Pi (El c) (El e)",
        Sigma(El(c), El(e)))

    # derivable consequences
    add("derived.fst-sub", SubTm(Fst(p), r), Fst(SubTm(p, r)), "(p.1)[r] = p[r].1",
        Fst(SubTm(p2, r)), derived=True)
    # the type of p.2 mentions p, so the control is a fresh term of that type
    snd_ty = k.typecheck(SubTm(Snd(p), r)).ty
    add("derived.snd-sub", SubTm(Snd(p), r), Snd(SubTm(p, r)), "(p.2)[r] = p[r].2",
        GenTm("z", D, snd_ty), derived=True)
    add("derived.app-sub", SubTm(App(f), lift(r, AG, D)), App(SubTm(f, r)),
        "(app f)[r o w, v] = app (f[r])", App(SubTm(f2, r)), derived=True)
    return out


_CATALOGUE: Optional[list[AxiomInstance]] = None


@deep
def catalogue(group: Optional[str] = None) -> list[AxiomInstance]:
    """The axiom instances in their stable order, optionally one group."""
    global _CATALOGUE
    if _CATALOGUE is None:
        _CATALOGUE = _build()
    if group is None:
        return list(_CATALOGUE)
    if group not in GROUPS:
        raise ValueError(f"unknown group {group!r}; choose from {', '.join(GROUPS)}")
    return [ax for ax in _CATALOGUE if ax.group == group]


def by_id(ident: str) -> AxiomInstance:
    for ax in catalogue():
        if ax.id == ident:
            return ax
    raise KeyError(ident)


def _clip(t: Term) -> str:
    return render(t)


@deep
def verify_axiom(ax: AxiomInstance, fuel: Optional[int] = None, search_depth: Optional[int] = None,
                 trace: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    k = Kernel(fuel=fuel, trace=trace) if search_depth is None else \
        Kernel(fuel=fuel, search_depth=search_depth, trace=trace)

    def done(status, method, msg="", ls=None, rs=None, tr=()):
        return CheckResult(ax.id, status, method, k.steps,
                           _clip(ls) if ls is not None else "", _clip(rs) if rs is not None else "",
                           msg, time.perf_counter() - t0, list(tr))

    ls = rs = None
    try:
        for side, term in (("lhs", ax.lhs), ("rhs", ax.rhs)):
            if not k.judgment_eq(k.typecheck(term), ax.judgment):
                return done("fail", "typecheck", f"{side} does not inhabit the stated judgment")
        ls, rs = star_in(k, ax.lhs), star_in(k, ax.rhs)
        want = k.judgment_of_star(ax.lhs, ax.judgment)
        for side, term in (("lhs", ls), ("rhs", rs)):
            if not k.judgment_eq(k.typecheck(term), want):
                return done("fail", "typecheck", f"star of {side} inhabits a different judgment, so the sides differ",
                            ls, rs)
        verdict = equal(ls, rs, want, kernel=k)
        status = "pass" if verdict.equal else "fail"
        msg = "" if verdict.equal else "translated sides are not judgmentally equal"
        return done(status, verdict.method, msg, ls, rs, verdict.trace)
    except ResourceExhausted as e:
        return done("resource-exhausted", "normalization", str(e), ls, rs)
    except TypeCheckError as e:
        return done("fail", "typecheck", f"translation is ill-typed: {e}", ls, rs)


def run_appendix(group: Optional[str] = None, mutate: Optional[str] = None,
                 fuel: Optional[int] = None, search_depth: Optional[int] = None) -> list[CheckResult]:
    axioms = catalogue(group)
    if mutate is not None:
        ids = [ax.id for ax in catalogue()]
        if mutate not in ids:
            raise KeyError(f"unknown axiom id {mutate!r}")
        axioms = [ax.mutated() if ax.id == mutate else ax for ax in axioms]
    return [verify_axiom(ax, fuel=fuel, search_depth=search_depth) for ax in axioms]


def mutable_ids() -> list[str]:
    return [ax.id for ax in catalogue() if ax.mutant is not None]


__all__ = [
    "AxiomInstance", "CheckResult", "CATALOGUE_VERSION", "GROUPS", "catalogue", "by_id",
    "verify_axiom", "run_appendix", "mutable_ids", "lift",
]
