"""Semantic values, evaluation and type-directed readback.

Substitutions evaluate to environments ``SubV(base, items)``: ``items`` holds
one value per telescope entry of the codomain and ``base`` is the part of the
substitution landing in the codomain's base (``None`` for the empty context).
Variables are de Bruijn levels counted from the base of the context, so
values never need weakening.

Readback is type-directed and produces η-long terms: inhabitants of ⊤ read
back as ``tt``, of Σ as pairs, of Π as λs, and substitutions into extended
contexts as ``pairsub`` chains.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .syntax import (
    App, Comp, El, Eps, Ext, Fst, Id, Lam, P1, P2, PairSub, PairTm, Pi,
    PiU, Sigma, SigmaU, Snd, SubT, SubTm, Term, Top, TopU, Tt, Univ,
)

if TYPE_CHECKING:
    from .typecheck import Kernel


class ResourceExhausted(Exception):
    def __init__(self, limit: int, what: str = "normalization fuel"):
        self.limit = limit
        super().__init__(f"{what} exhausted (limit {limit})")


# -- values -----------------------------------------------------------------

class SubV:
    __slots__ = ("base", "items")

    def __init__(self, base, items: tuple):
        self.base = base
        self.items = items

    def extend(self, v) -> "SubV":
        return SubV(self.base, self.items + (v,))

    def drop(self) -> "SubV":
        return SubV(self.base, self.items[:-1])


EMPTY_ENV = SubV(None, ())


class BaseVar:
    """The projection from the current context onto its generator base."""
    __slots__ = ("ctx",)

    def __init__(self, ctx: Term):
        self.ctx = ctx


class GenSubBase:
    """``π₁ᵏ (f ∘ env)``: the base part of a generator substitution."""
    __slots__ = ("head", "env", "k")

    def __init__(self, head: Term, env: SubV, k: int):
        self.head, self.env, self.k = head, env, k


class Closure:
    __slots__ = ("body", "env", "nbe")

    def __init__(self, body: Term, env: SubV, nbe: "NbE"):
        self.body, self.env, self.nbe = body, env, nbe

    def __call__(self, v):
        env = self.env.extend(v)
        if self.body.sort.name == "TY":
            return self.nbe.eval_ty(self.body, env)
        return self.nbe.eval_tm(self.body, env)


class ElClosure:
    __slots__ = ("clo", "nbe")

    def __init__(self, clo, nbe: "NbE"):
        self.clo, self.nbe = clo, nbe

    def __call__(self, v):
        return self.nbe.vel(self.clo(v))


# types
class VTop:
    __slots__ = ()


class VU:
    __slots__ = ()


VTOP, VUNIV = VTop(), VU()


class VSigma:
    __slots__ = ("dom", "fam")

    def __init__(self, dom, fam):
        self.dom, self.fam = dom, fam


class VPi:
    __slots__ = ("dom", "fam")

    def __init__(self, dom, fam):
        self.dom, self.fam = dom, fam


class VEl:
    __slots__ = ("code",)

    def __init__(self, code: "VNeu"):
        self.code = code


class VNeuTy:
    __slots__ = ("head", "env")

    def __init__(self, head: Term, env: SubV):
        self.head, self.env = head, env


# terms
class VTt:
    __slots__ = ()


VTT = VTt()


class VPair:
    __slots__ = ("fst", "snd")

    def __init__(self, a, b):
        self.fst, self.snd = a, b


class VLam:
    __slots__ = ("body",)

    def __init__(self, body: Closure):
        self.body = body


class VTopU:
    __slots__ = ()


VTOPU = VTopU()


class VSigmaU:
    __slots__ = ("dom", "fam")

    def __init__(self, dom, fam):
        self.dom, self.fam = dom, fam


class VPiU:
    __slots__ = ("dom", "fam")

    def __init__(self, dom, fam):
        self.dom, self.fam = dom, fam


class VNeu:
    __slots__ = ("ne", "ty")

    def __init__(self, ne, ty):
        self.ne, self.ty = ne, ty


# neutral spines
class NVar:
    __slots__ = ("level",)

    def __init__(self, level: int):
        self.level = level


class NHead:
    __slots__ = ("head", "env")

    def __init__(self, head: Term, env: SubV):
        self.head, self.env = head, env


class NProj:
    """``π₂ (π₁^(k-1-i) (f ∘ env))``: component ``i`` of a generator substitution."""
    __slots__ = ("head", "env", "k", "i")

    def __init__(self, head: Term, env: SubV, k: int, i: int):
        self.head, self.env, self.k, self.i = head, env, k, i


class NFst:
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class NSnd:
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class NApp:
    __slots__ = ("fn", "arg", "dom")

    def __init__(self, fn, arg, dom):
        self.fn, self.arg, self.dom = fn, arg, dom


class RCtx:
    """Readback context: the normal context syntax and its telescope length."""
    __slots__ = ("syn", "n")

    def __init__(self, syn: Term, n: int):
        self.syn, self.n = syn, n


class NbE:
    def __init__(self, kernel: "Kernel", fuel: int):
        self.k = kernel
        self.fuel = fuel
        self.limit = fuel
        self.steps = 0
        self.rules: dict[str, int] | None = None
        # readback memo: (kind, id(value), id(extra), context) -> (value, extra, term).
        # Values are kept alive in the entry so ids are never recycled; normal
        # forms are unique, so a shared value reads back the same way each time.
        self._rb: dict = {}

    def _memo(self, kind: str, v, extra, rc: "RCtx", compute):
        key = (kind, id(v), id(extra), rc.syn)
        hit = self._rb.get(key)
        if hit is not None and hit[0] is v and hit[1] is extra:
            return hit[2]
        out = compute()
        self._rb[key] = (v, extra, out)
        return out

    def tick(self, rule: str | None = None) -> None:
        self.steps += 1
        if self.steps > self.limit:
            raise ResourceExhausted(self.limit)
        if rule is not None and self.rules is not None:
            self.rules[rule] = self.rules.get(rule, 0) + 1

    # -- evaluation ---------------------------------------------------------

    def eval_sub(self, s: Term, env: SubV) -> SubV:
        self.tick()
        tag = s.tag
        if tag == "id":
            self.tick("sub.id")
            return env
        if tag == "comp":
            return self.eval_sub(s.args[0], self.eval_sub(s.args[1], env))
        if tag == "eps":
            self.tick("sub.eps")
            return EMPTY_ENV
        if tag == "pairsub":
            e = self.eval_sub(s.args[0], env)
            return e.extend(self.eval_tm(s.args[1], env))
        if tag == "p1":
            e = self.eval_sub(s.args[0], env)
            if not e.items:
                raise ValueError("p1 of a substitution into a non-extended context")
            self.tick("sub.p1-beta")
            return e.drop()
        if tag == "gensub":
            return self.eval_gensub(s, env)
        raise ValueError(f"not a substitution: {tag}")

    def eval_gensub(self, f: Term, env: SubV) -> SubV:
        info = self.k.ctx_info(f.args[2])
        k = len(info.entries)
        base = None if info.base.tag == "empty" else GenSubBase(f, env, k)
        acc = SubV(base, ())
        for i, a in enumerate(info.entries):
            ty = self.eval_ty(a, acc)
            acc = acc.extend(VNeu(NProj(f, env, k, i), ty))
        return acc

    def eval_tm(self, t: Term, env: SubV):
        self.tick()
        tag = t.tag
        a = t.args
        if tag == "subt":
            return self.eval_tm(a[0], self.eval_sub(a[1], env))
        if tag == "p2":
            e = self.eval_sub(a[0], env)
            self.tick("sub.p2-beta")
            return e.items[-1]
        if tag == "tt":
            return VTT
        if tag == "fst":
            return self.vfst(self.eval_tm(a[0], env))
        if tag == "snd":
            return self.vsnd(self.eval_tm(a[0], env))
        if tag == "pairtm":
            return VPair(self.eval_tm(a[0], env), self.eval_tm(a[1], env))
        if tag == "app":
            if not env.items:
                raise ValueError("app evaluated outside an extended context")
            return self.vapp(self.eval_tm(a[0], env.drop()), env.items[-1])
        if tag == "lam":
            return VLam(Closure(a[0], env, self))
        if tag == "topu":
            return VTOPU
        if tag == "sigmau":
            return VSigmaU(self.eval_tm(a[0], env), Closure(a[1], env, self))
        if tag == "piu":
            return VPiU(self.eval_tm(a[0], env), Closure(a[1], env, self))
        if tag in ("gentm", "starsub", "startm"):
            info = self.k.head_info(t)
            return VNeu(NHead(t, env), self.eval_ty(info.ty, env))
        raise ValueError(f"not a term: {tag}")

    def eval_ty(self, a: Term, env: SubV):
        self.tick()
        tag = a.tag
        if tag == "subT":
            return self.eval_ty(a.args[0], self.eval_sub(a.args[1], env))
        if tag == "top":
            return VTOP
        if tag == "univ":
            return VUNIV
        if tag == "sigma":
            return VSigma(self.eval_ty(a.args[0], env), Closure(a.args[1], env, self))
        if tag == "pi":
            return VPi(self.eval_ty(a.args[0], env), Closure(a.args[1], env, self))
        if tag == "el":
            return self.vel(self.eval_tm(a.args[0], env))
        if tag in ("genty", "starctx", "starty"):
            return VNeuTy(a, env)
        raise ValueError(f"not a type: {tag}")

    # -- eliminators ----------------------------------------------------------

    def vfst(self, v):
        if isinstance(v, VPair):
            self.tick("sigma.beta1")
            return v.fst
        ty = v.ty
        if not isinstance(ty, VSigma):
            raise ValueError("fst of a non-pair")
        return VNeu(NFst(v), ty.dom)

    def vsnd(self, v):
        if isinstance(v, VPair):
            self.tick("sigma.beta2")
            return v.snd
        ty = v.ty
        if not isinstance(ty, VSigma):
            raise ValueError("snd of a non-pair")
        return VNeu(NSnd(v), ty.fam(VNeu(NFst(v), ty.dom)))

    def vapp(self, f, u):
        if isinstance(f, VLam):
            self.tick("pi.beta")
            return f.body(u)
        ty = f.ty
        if not isinstance(ty, VPi):
            raise ValueError("application of a non-function")
        return VNeu(NApp(f, u, ty.dom), ty.fam(u))

    def vel(self, v):
        if isinstance(v, VTopU):
            self.tick("univ.el-topu")
            return VTOP
        if isinstance(v, VSigmaU):
            self.tick("univ.el-sigmau")
            return VSigma(self.vel(v.dom), ElClosure(v.fam, self))
        if isinstance(v, VPiU):
            self.tick("univ.el-piu")
            return VPi(self.vel(v.dom), ElClosure(v.fam, self))
        return VEl(v)

    # -- readback -------------------------------------------------------------

    def fresh(self, rc: RCtx, ty, ty_syn: Term) -> tuple[VNeu, RCtx]:
        return VNeu(NVar(rc.n), ty), RCtx(Ext(rc.syn, ty_syn), rc.n + 1)

    def rb_ty(self, ty, rc: RCtx) -> Term:
        return self._memo("ty", ty, None, rc, lambda: self._rb_ty(ty, rc))

    def _rb_ty(self, ty, rc: RCtx) -> Term:
        self.tick()
        if isinstance(ty, VTop):
            return Top(rc.syn)
        if isinstance(ty, VU):
            return Univ(rc.syn)
        if isinstance(ty, (VSigma, VPi)):
            dom = self.rb_ty(ty.dom, rc)
            x, rc2 = self.fresh(rc, ty.dom, dom)
            fam = self.rb_ty(ty.fam(x), rc2)
            return Sigma(dom, fam) if isinstance(ty, VSigma) else Pi(dom, fam)
        if isinstance(ty, VEl):
            return El(self.rb_ne(ty.code, rc))
        if isinstance(ty, VNeuTy):
            return self.rb_head(ty.head, ty.env, rc, SubT)
        raise TypeError(f"not a type value: {ty!r}")

    def rb_tm(self, ty, v, rc: RCtx) -> Term:
        return self._memo("tm", v, ty, rc, lambda: self._rb_tm(ty, v, rc))

    def _rb_tm(self, ty, v, rc: RCtx) -> Term:
        self.tick()
        if isinstance(ty, VTop):
            if not isinstance(v, VTt):
                self.tick("unit.eta")
            return Tt(rc.syn)
        if isinstance(ty, VSigma):
            if not isinstance(v, VPair):
                self.tick("sigma.eta")
            a = self.vfst(v)
            b = self.vsnd(v)
            dom = self.rb_ty(ty.dom, rc)
            x, rc2 = self.fresh(rc, ty.dom, dom)
            fam = self.rb_ty(ty.fam(x), rc2)
            return PairTm(self.rb_tm(ty.dom, a, rc), self.rb_tm(ty.fam(a), b, rc), fam)
        if isinstance(ty, VPi):
            if not isinstance(v, VLam):
                self.tick("pi.eta")
            dom = self.rb_ty(ty.dom, rc)
            x, rc2 = self.fresh(rc, ty.dom, dom)
            return Lam(self.rb_tm(ty.fam(x), self.vapp(v, x), rc2))
        if isinstance(ty, VU):
            if isinstance(v, VTopU):
                return TopU(rc.syn)
            if isinstance(v, (VSigmaU, VPiU)):
                dom = self.rb_tm(VUNIV, v.dom, rc)
                eldom = self.vel(v.dom)
                x, rc2 = self.fresh(rc, eldom, self.rb_ty(eldom, rc))
                fam = self.rb_tm(VUNIV, v.fam(x), rc2)
                return SigmaU(dom, fam) if isinstance(v, VSigmaU) else PiU(dom, fam)
        if isinstance(v, VNeu):
            return self.rb_ne(v, rc)
        raise TypeError(f"ill-typed value {type(v).__name__} at {type(ty).__name__}")

    def rb_ne(self, v: VNeu, rc: RCtx) -> Term:
        return self._memo("ne", v, None, rc, lambda: self._rb_ne(v, rc))

    def _rb_ne(self, v: VNeu, rc: RCtx) -> Term:
        self.tick()
        ne = v.ne
        if isinstance(ne, NVar):
            j = rc.n - 1 - ne.level
            if j < 0:
                raise ValueError("variable escapes its context")
            s = Id(rc.syn)
            for _ in range(j):
                s = P1(s)
            return P2(s)
        if isinstance(ne, NHead):
            return self.rb_head(ne.head, ne.env, rc, SubTm)
        if isinstance(ne, NProj):
            s = self.rb_head(ne.head, ne.env, rc, Comp)
            for _ in range(ne.k - 1 - ne.i):
                s = P1(s)
            return P2(s)
        if isinstance(ne, NFst):
            return Fst(self.rb_ne(ne.arg, rc))
        if isinstance(ne, NSnd):
            return Snd(self.rb_ne(ne.arg, rc))
        if isinstance(ne, NApp):
            fn = self.rb_ne(ne.fn, rc)
            dom = self.rb_ty(ne.dom, rc)
            arg = self.rb_tm(ne.dom, ne.arg, rc)
            return SubTm(App(fn), PairSub(Id(rc.syn), arg, dom))
        raise TypeError(f"unknown neutral {type(ne).__name__}")

    def rb_head(self, head: Term, env: SubV, rc: RCtx, wrap) -> Term:
        info = self.k.head_info(head)
        s = self.rb_sub(env, info.ctx, rc)
        if info.ctx.syn is rc.syn and s is self.k.identity_nf(rc.syn):
            return info.canon
        return wrap(info.canon, s)

    def rb_sub(self, env: SubV, cod, rc: RCtx) -> Term:
        """Read back ``env`` as a substitution into the context described by ``cod``."""
        return self._memo("sub", env, cod, rc, lambda: self._rb_sub(env, cod, rc))

    def _rb_sub(self, env: SubV, cod, rc: RCtx) -> Term:
        self.tick()
        base = env.base
        if cod.base.tag == "empty":
            acc = Eps(rc.syn)
        elif isinstance(base, BaseVar):
            acc = Id(rc.syn)
            for _ in range(rc.n):
                acc = P1(acc)
        elif isinstance(base, GenSubBase):
            acc = self.rb_head(base.head, base.env, rc, Comp)
            for _ in range(base.k):
                acc = P1(acc)
        else:
            raise ValueError("substitution base does not match codomain")
        if len(env.items) != len(cod.entries):
            raise ValueError("substitution length does not match codomain")
        for i, a in enumerate(cod.entries):
            ty = self.eval_ty(a, SubV(base, env.items[:i]))
            acc = PairSub(acc, self.rb_tm(ty, env.items[i], rc), a)
        return acc
