"""Iterated star on a free context generator: the unary semi-cubical tower.

Level 1 is ``X* : Ty X``.  Level ``n+1`` translates level ``n``'s body as a
type, which lands in ``(Γ, Γ*, A[w])`` for ``Γ`` the level-``n`` ambient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .nbe import VSigma
from .param import star_in
from .syntax import (
    Comp, Ext, GenCtx, Id, PairSub, PairTm, SubT, SubTm, Term, telescope, vr, wk,
)
from .typecheck import Kernel, ResourceExhausted, TyIn, deep

DEFAULT_MAX_DIM = 5
DEFAULT_NODE_BUDGET = 2_000_000


@dataclass
class TowerLevel:
    dim: int
    ambient: Term
    body: Term
    telescope_len: int
    flattened_len: Optional[int] = None
    flattened: Optional[list[Term]] = field(default=None, repr=False)


@dataclass
class TowerReport:
    levels: list[TowerLevel]
    max_dim: int
    flatten: bool


def dag_size(t: Term) -> int:
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(u.children)
    return len(seen)


class _Flattener:
    def __init__(self, k: Kernel):
        self.k = k

    def is_sigma(self, ty: Term, ctx: Term) -> bool:
        if ty.tag == "sigma":
            return True
        ci = self.k.ctx_info(ctx)
        return isinstance(self.k.nbe.eval_ty(ty, ci.env), VSigma)

    def entry(self, ctx: Term, e: Term) -> tuple[Term, Term, Term]:
        """Flatten one entry ``e : Ty ctx``.

        Returns ``(ctx', ws, tm)`` with ``ws : Sub ctx' ctx`` and
        ``tm : Tm ctx' e[ws]`` reassembling the packed value.
        """
        if not self.is_sigma(e, ctx):
            c = Ext(ctx, e)
            return c, wk(c), vr(c)
        a, b = self.k._view(e, ctx, "sigma", "NotASigma", ())
        c1, w1, ta = self.entry(ctx, a)
        c2, w2, tb = self.entry(c1, SubT(b, PairSub(w1, ta, a)))
        ws = Comp(w1, w2)
        fam = self.k._view(SubT(e, ws), c2, "sigma", "NotASigma", ())[1]
        return c2, ws, PairTm(SubTm(ta, w2), tb, fam)

    def context(self, ctx: Term) -> tuple[Term, Term]:
        """``(flat, θ)`` with ``θ : Sub flat ctx`` an isomorphism."""
        base, entries = telescope(ctx)
        flat, theta = base, Id(base)
        for e in entries:
            flat, ws, tm = self.entry(flat, e if theta.tag == "id" else SubT(e, theta))
            theta = PairSub(Comp(theta, ws), tm, e)
        return flat, theta


def flatten_telescope(body: Term, ambient: Term, kernel: Optional[Kernel] = None) -> list[Term]:
    """Entries of ``ambient`` after splitting every Σ; ``body`` must live in ``ambient``."""
    return deep(_flatten)(body, ambient, kernel or Kernel())[0]


def _flatten(body: Term, ambient: Term, k: Kernel) -> tuple[list[Term], Term, Term]:
    j = k.typecheck(body)
    if not k.ctx_eq(j.ctx, ambient):
        raise ValueError("body does not live in the ambient context")
    flat, theta = _Flattener(k).context(ambient)
    entries = telescope(flat)[1]
    return entries, flat, SubT(body, theta)


@deep
def tower(max_dim: int = DEFAULT_MAX_DIM, flatten: bool = False, kernel: Optional[Kernel] = None,
          node_budget: int = DEFAULT_NODE_BUDGET, name: str = "X") -> TowerReport:
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    k = kernel or Kernel()
    x = GenCtx(name)
    ambient, body = x, star_in(k, x)
    levels = []
    for dim in range(1, max_dim + 1):
        if dim > 1:
            gg = Ext(ambient, star_in(k, ambient))
            ambient, body = Ext(gg, SubT(body, wk(gg))), star_in(k, body)
        size = dag_size(ambient) + dag_size(body)
        if size > node_budget:
            raise ResourceExhausted(node_budget, f"tower term size at dim {dim}")
        j = k.typecheck(body)
        if not (isinstance(j, TyIn) and k.ctx_eq(j.ctx, ambient)):
            raise AssertionError(f"level {dim} body does not live in its ambient")
        level = TowerLevel(dim, ambient, body, len(telescope(ambient)[1]))
        if flatten:
            entries, _, _ = _flatten(body, ambient, k)
            level.flattened = entries
            level.flattened_len = len(entries)
        levels.append(level)
    return TowerReport(levels, max_dim, flatten)


__all__ = ["TowerLevel", "TowerReport", "tower", "flatten_telescope", "dag_size",
           "DEFAULT_MAX_DIM"]
