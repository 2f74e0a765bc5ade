"""The unary parametricity translation ``_*``.

``star`` is a structural recursion on raw syntax, one clause per
constructor; generator heads and existing Star nodes are left as formal
Star symbols.  Every PairSub / PairTm annotation in the output is computed
from judgments (never starred syntactically), so outputs typecheck by
construction.

Typing of the output, for ``GG = (Γ, Γ*)``::

    Γ* : Ty Γ
    A* : Ty (GG, A[w])
    σ* : Tm GG Δ*[σ∘w]
    t* : Tm GG A*[id, t[w]]
"""

from __future__ import annotations

from typing import Optional

from .syntax import (
    App, Comp, El, Ext, Fst, Id, Lam, PairSub, PairTm, Pi, PiU, SigmaU, Sigma,
    Snd, StarCtx, StarSub, StarTm, StarTy, SubT, SubTm, Term, Top, TopU, Tt, Univ,
    star_head_ok, tuple_sub, vr, wk, wks,
)
from .typecheck import Kernel, TypeCheckError, deep


class _Star:
    def __init__(self, k: Kernel):
        self.k = k
        self.level = 0  # current nesting of star calls
        self.max_level = 0

    # -- helpers ----------------------------------------------------------------

    def gg(self, ctx: Term) -> Term:
        return Ext(ctx, self.star(ctx))

    def ty_ctx(self, a: Term) -> tuple[Term, Term, Term]:
        """``(Γ, GG, (GG, A[w]))`` for ``A : Ty Γ``."""
        g = self.k.typecheck(a).ctx
        gg = self.gg(g)
        return g, gg, Ext(gg, SubT(a, wk(gg)))

    def fam(self, ty: Term, ctx: Term) -> Term:
        """Family of a Σ-type living in ``ctx``."""
        return self.k._view(ty, ctx, "sigma", "NotASigma", ())[1]

    def pair_at(self, ctx: Term, first: Term, second: Term, star_ctx_of: Term, base: Term,
                comp: Term) -> Term:
        """``(first, second)`` at ``star_ctx_of*[base, comp]`` inside ``ctx``.

        ``star_ctx_of = (Δ, A)`` and the pair inhabits ``(Δ,A)*`` pulled back
        along ``(base, comp) : Sub ctx (Δ, A)``.
        """
        delta = tuple_sub(star_ctx_of, base, comp)
        return PairTm(first, second, self.fam(SubT(self.star(star_ctx_of), delta), ctx))

    # -- entry point --------------------------------------------------------------

    def star(self, t: Term) -> Term:
        hit = self.k.star_memo.get(t)
        if hit is not None:
            return hit
        if t.tag in ("starctx", "starty", "starsub", "startm") and not star_head_ok(t):
            raise TypeCheckError("IllFormedStar", f"{t.tag} wraps the composite head {t.args[0].tag}")
        self.level += 1
        self.max_level = max(self.max_level, self.level)
        try:
            out = getattr(self, "c_" + t.tag)(t, *t.args)
        finally:
            self.level -= 1
        self.k.star_memo[t] = out
        return out

    # -- contexts -------------------------------------------------------------------

    def c_empty(self, t):
        return Top(t)

    def c_genctx(self, t, name):
        return StarCtx(t)

    def c_ext(self, t, g, a):
        cp = Ext(t, SubT(self.star(g), wk(t)))
        _, _, ta = self.ty_ctx(a)
        rho = tuple_sub(ta, wks(cp, 2), vr(cp), SubTm(vr(t), wk(cp)))
        return Sigma(SubT(self.star(g), wk(t)), SubT(self.star(a), rho))

    # -- types ----------------------------------------------------------------------

    def c_subT(self, t, a, s):
        _, _, tt = self.ty_ctx(t)
        _, _, ta = self.ty_ctx(a)
        rho = tuple_sub(ta, Comp(s, wks(tt, 2)), SubTm(self.star(s), wk(tt)), vr(tt))
        return SubT(self.star(a), rho)

    def c_top(self, t, g):
        _, _, tt = self.ty_ctx(t)
        return Top(tt)

    def c_sigma(self, t, a, b):
        _, _, tt = self.ty_ctx(t)
        _, _, ta = self.ty_ctx(a)
        gb, _, tb = self.ty_ctx(b)
        eta1 = tuple_sub(ta, wk(tt), Fst(vr(tt)))
        a1 = SubT(self.star(a), eta1)
        tp = Ext(tt, a1)
        v1w = SubTm(Fst(vr(tt)), wk(tp))
        gg = tt.args[0]
        pair = self.pair_at(tp, SubTm(vr(gg), wks(tp, 2)), vr(tp), gb, wks(tp, 3), v1w)
        eta2 = tuple_sub(tb, wks(tp, 3), v1w, pair, SubTm(Snd(vr(tt)), wk(tp)))
        return Sigma(a1, SubT(self.star(b), eta2))

    def c_pi(self, t, a, b):
        _, _, tt = self.ty_ctx(t)
        _, _, ta = self.ty_ctx(a)
        gb, _, tb = self.ty_ctx(b)
        gg = tt.args[0]
        dom1 = SubT(a, wks(tt, 2))
        t1 = Ext(tt, dom1)
        dom2 = SubT(self.star(a), tuple_sub(ta, wks(t1, 2), vr(t1)))
        t2 = Ext(t1, dom2)
        vw = SubTm(vr(t1), wk(t2))
        pair = self.pair_at(t2, SubTm(vr(gg), wks(t2, 3)), vr(t2), gb, wks(t2, 4), vw)
        appv = SubTm(App(vr(tt)), wk(t2))
        s3 = tuple_sub(tb, wks(t2, 4), vw, pair, appv)
        return Pi(dom1, Pi(dom2, SubT(self.star(b), s3)))

    def c_univ(self, t, g):
        _, _, tt = self.ty_ctx(t)
        el = El(vr(tt))
        return Pi(el, Univ(Ext(tt, el)))

    def c_el(self, t, u):
        return El(App(self.star(u)))

    def c_genty(self, t, name, g):
        return StarTy(t)

    def c_starctx(self, t, g):
        return StarTy(t)

    def c_starty(self, t, a):
        return StarTy(t)

    # -- substitutions ----------------------------------------------------------------

    def c_comp(self, t, s, n):
        js = self.k.typecheck(s)
        jt = self.k.typecheck(t)
        gg = self.gg(jt.dom)
        dd = self.gg(js.dom)
        return SubTm(self.star(s), tuple_sub(dd, Comp(n, wk(gg)), self.star(n)))

    def c_id(self, t, g):
        return vr(self.gg(g))

    def c_eps(self, t, g):
        return Tt(self.gg(g))

    def c_pairsub(self, t, s, m, a):
        j = self.k.typecheck(t)
        gg = self.gg(j.dom)
        want = SubT(self.star(j.cod), Comp(t, wk(gg)))
        return PairTm(self.star(s), self.star(m), self.fam(want, gg))

    def c_p1(self, t, s):
        return Fst(self.star(s))

    def c_gensub(self, t, name, g, d):
        return StarSub(t)

    # -- terms --------------------------------------------------------------------------

    def c_subt(self, t, m, s):
        jm = self.k.typecheck(m)
        js = self.k.typecheck(s)
        gg = self.gg(js.dom)
        dd = self.gg(jm.ctx)
        return SubTm(self.star(m), tuple_sub(dd, Comp(s, wk(gg)), self.star(s)))

    def c_p2(self, t, s):
        return Snd(self.star(s))

    def c_tt(self, t, g):
        return Tt(self.gg(g))

    def c_fst(self, t, m):
        return Fst(self.star(m))

    def c_snd(self, t, m):
        return Snd(self.star(m))

    def c_pairtm(self, t, s, m, b):
        j = self.k.typecheck(t)
        gg = self.gg(j.ctx)
        w = wk(gg)
        want = SubT(self.star(j.ty), PairSub(Id(gg), SubTm(t, w), SubT(j.ty, w)))
        return PairTm(self.star(s), self.star(m), self.fam(want, gg))

    def c_app(self, t, m):
        ga = self.k.typecheck(t).ctx
        tt = self.gg(ga)
        inner = App(App(self.star(m)))
        r = self.k.typecheck(inner).ctx
        nu1 = tuple_sub(r, wks(tt, 2), Fst(vr(tt)), SubTm(vr(ga), wk(tt)), Snd(vr(tt)))
        return SubTm(inner, nu1)

    def c_lam(self, t, m):
        ga = self.k.typecheck(m).ctx
        if ga.tag != "ext":
            raise TypeCheckError("ContextMismatch", "lam body must live in an extended context")
        g, a = ga.args
        gg = self.gg(g)
        c1 = Ext(gg, SubT(a, wk(gg)))
        c2 = Ext(c1, self.star(a))
        vw = SubTm(vr(c1), wk(c2))
        pair = self.pair_at(c2, SubTm(vr(gg), wks(c2, 2)), vr(c2), ga, wks(c2, 3), vw)
        nu2 = tuple_sub(self.gg(ga), wks(c2, 3), vw, pair)
        return Lam(Lam(SubTm(self.star(m), nu2)))

    def c_topu(self, t, g):
        gg = self.gg(g)
        return Lam(TopU(Ext(gg, El(SubTm(t, wk(gg))))))

    def _code_ctx(self, t):
        g = self.k.typecheck(t).ctx
        gg = self.gg(g)
        return gg, Ext(gg, El(SubTm(t, wk(gg))))

    def c_sigmau(self, t, s, u):
        gg, c = self._code_ctx(t)
        apps = App(self.star(s))
        appt = App(self.star(u))
        gu = self.k.typecheck(u).ctx
        eta1 = tuple_sub(self.k.typecheck(apps).ctx, wk(c), Fst(vr(c)))
        s1 = SubTm(apps, eta1)
        cp = Ext(c, El(s1))
        v1w = SubTm(Fst(vr(c)), wk(cp))
        pair = self.pair_at(cp, SubTm(vr(gg), wks(cp, 2)), vr(cp), gu, wks(cp, 3), v1w)
        eta2 = tuple_sub(self.k.typecheck(appt).ctx, wks(cp, 3), v1w, pair, SubTm(Snd(vr(c)), wk(cp)))
        return Lam(SigmaU(s1, SubTm(appt, eta2)))

    def c_piu(self, t, s, u):
        gg, c = self._code_ctx(t)
        apps = App(self.star(s))
        appt = App(self.star(u))
        gu = self.k.typecheck(u).ctx
        s1 = SubTm(s, wks(c, 2))
        c1 = Ext(c, El(s1))
        s2 = SubTm(apps, tuple_sub(self.k.typecheck(apps).ctx, wks(c1, 2), vr(c1)))
        c2 = Ext(c1, El(s2))
        vw = SubTm(vr(c1), wk(c2))
        pair = self.pair_at(c2, SubTm(vr(gg), wks(c2, 3)), vr(c2), gu, wks(c2, 4), vw)
        appv = SubTm(App(vr(c)), wk(c2))
        s3 = tuple_sub(self.k.typecheck(appt).ctx, wks(c2, 4), vw, pair, appv)
        return Lam(PiU(s1, PiU(s2, SubTm(appt, s3))))

    def c_gentm(self, t, name, g, a):
        return StarTm(t)

    def c_starsub(self, t, s):
        return StarTm(t)

    def c_startm(self, t, m):
        return StarTm(t)


def star_in(k: Kernel, t: Term) -> Term:
    k._enter()
    try:
        return _Star(k).star(t)
    finally:
        k._leave()


@deep
def star_monitored(t: Term, kernel: Optional[Kernel] = None) -> tuple[Term, int]:
    """``star`` together with the deepest nesting of translation calls it made."""
    k = kernel or Kernel()
    k.typecheck(t)
    s = _Star(k)
    k._enter()
    try:
        out = s.star(t)
    finally:
        k._leave()
    return out, s.max_level


@deep
def star(t: Term, kernel: Optional[Kernel] = None) -> Term:
    """The parametricity translation of a well-typed term."""
    k = kernel or Kernel()
    k.typecheck(t)
    return star_in(k, t)


__all__ = ["star", "star_in", "star_monitored"]
