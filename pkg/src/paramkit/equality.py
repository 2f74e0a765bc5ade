"""Judgmental equality: normalization first, bounded rewriting search second.

The search only applies oriented instances of the calculus' equations (either
direction counts, since both sides are searched), and every intermediate term
is re-typechecked, so a positive answer from either method is sound.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .syntax import (
    Comp, El, PairSub, SubT, SubTm, Term, Top, Univ, TopU, Tt, replace_at, subterms,
)
from .typecheck import Judgment, Kernel, ResourceExhausted, TypeCheckError, deep

SEARCH_NODE_BUDGET = 2000  # candidate terms generated, both directions
SEARCH_SIZE_LIMIT = 200_000  # tree size above which positions are not enumerated


@dataclass(frozen=True)
class NormalForm:
    term: Term
    judgment: Judgment
    steps: int


@dataclass
class EqualityVerdict:
    equal: bool
    method: str  # "normalization" or "bounded-search"
    steps: int
    trace: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.equal


def _trace_lines(k: Kernel) -> list[str]:
    rules = k.nbe.rules or {}
    return [f"{name} x{count}" for name, count in sorted(rules.items())]


@deep
def normalize(term: Term, j: Optional[Judgment] = None, kernel: Optional[Kernel] = None) -> NormalForm:
    k = kernel or Kernel()
    k._enter()
    try:
        if j is None:
            j = k.typecheck(term)
        nf = k.normal(term, j)
        return NormalForm(nf, j, k.steps)
    finally:
        k._leave()


# -- rewriting search ------------------------------------------------------------

def _dom(k: Kernel, s: Term) -> Term:
    return k.typecheck(s).dom


def _rewrites(k: Kernel, t: Term) -> Iterator[tuple[str, Term]]:
    """Root-level axiom instances applicable to ``t``."""
    tag, a = t.tag, t.args
    if tag == "comp":
        s, n = a
        if s.tag == "id":
            yield "sub.idl", n
        if n.tag == "id":
            yield "sub.idr", s
        if s.tag == "comp":
            yield "sub.assoc", Comp(s.args[0], Comp(s.args[1], n))
        if n.tag == "comp":
            yield "sub.assoc", Comp(Comp(s, n.args[0]), n.args[1])
        if s.tag == "pairsub":
            yield "sub.pair-comp", PairSub(Comp(s.args[0], n), SubTm(s.args[1], n), s.args[2])
    elif tag == "p1" and a[0].tag == "pairsub":
        yield "sub.p1-beta", a[0].args[0]
    elif tag == "p2" and a[0].tag == "pairsub":
        yield "sub.p2-beta", a[0].args[1]
    elif tag == "subT":
        ty, s = a
        if s.tag == "id":
            yield "ty.sub-id", ty
        if ty.tag == "subT":
            yield "ty.sub-comp", SubT(ty.args[0], Comp(ty.args[1], s))
        if ty.tag == "top":
            yield "unit.top-sub", Top(_dom(k, s))
        if ty.tag == "univ":
            yield "univ.sub", Univ(_dom(k, s))
        if ty.tag == "el":
            yield "univ.el-sub", El(SubTm(ty.args[0], s))
    elif tag == "subt":
        m, s = a
        if s.tag == "id":
            yield "tm.sub-id", m
        if m.tag == "subt":
            yield "tm.sub-comp", SubTm(m.args[0], Comp(m.args[1], s))
        if m.tag == "tt":
            yield "unit.tt-sub", Tt(_dom(k, s))
        if m.tag == "topu":
            yield "univ.topu-sub", TopU(_dom(k, s))
    elif tag == "fst" and a[0].tag == "pairtm":
        yield "sigma.beta1", a[0].args[0]
    elif tag == "snd" and a[0].tag == "pairtm":
        yield "sigma.beta2", a[0].args[1]
    elif tag == "app" and a[0].tag == "lam":
        yield "pi.beta", a[0].args[0]
    elif tag == "lam" and a[0].tag == "app":
        yield "pi.eta", a[0].args[0]


def _neighbours(k: Kernel, t: Term) -> Iterator[tuple[str, Term]]:
    for path, u in subterms(t):
        for rule, new in _rewrites(k, u):
            cand = replace_at(t, path, new)
            try:
                k.typecheck(cand)
            except TypeCheckError:
                continue
            yield f"{rule} at /{'/'.join(map(str, path))}", cand


def _search(k: Kernel, a: Term, b: Term, depth: int, budget: int) -> Optional[list[str]]:
    if a is b:
        return []
    # parents[side][term] = (previous term, rule)
    parents = [{a: None}, {b: None}]
    frontier = [deque([a]), deque([b])]
    nodes = 2
    for _ in range(depth):
        for side in (0, 1):
            nxt: deque = deque()
            while frontier[side]:
                u = frontier[side].popleft()
                for rule, v in _neighbours(k, u):
                    nodes += 1
                    if nodes > budget:
                        return None
                    if v in parents[side]:
                        continue
                    parents[side][v] = (u, rule)
                    if v in parents[1 - side]:
                        return _path(parents, v)
                    nxt.append(v)
            frontier[side] = nxt
    return None


def _path(parents, meet: Term) -> list[str]:
    left, right = [], []
    u = meet
    while parents[0][u] is not None:
        u, rule = parents[0][u]
        left.append(rule)
    u = meet
    while parents[1][u] is not None:
        u, rule = parents[1][u]
        right.append(rule + " (reversed)")
    return list(reversed(left)) + right


@deep
def equal(a: Term, b: Term, j: Optional[Judgment] = None, kernel: Optional[Kernel] = None,
          search_depth: Optional[int] = None, search_budget: int = SEARCH_NODE_BUDGET) -> EqualityVerdict:
    """Decide ``a = b`` at judgment ``j``; ``ResourceExhausted`` propagates."""
    k = kernel or Kernel()
    depth = k.search_depth if search_depth is None else search_depth
    k._enter()
    try:
        if j is None:
            j = k.typecheck(a)
        jb = k.typecheck(b)
        if not k.judgment_eq(j, jb):
            return EqualityVerdict(False, "normalization", k.steps, ["judgments differ"])
        na = k.normal(a, j)
        nb = k.normal(b, j)
        if na is nb:
            return EqualityVerdict(True, "normalization", k.steps, _trace_lines(k))
        steps = k.steps
        if depth <= 0 or a.size + b.size > SEARCH_SIZE_LIMIT:
            return EqualityVerdict(False, "normalization", steps, _trace_lines(k))
        chain = _search(k, a, b, depth, search_budget)
        if chain is not None:
            return EqualityVerdict(True, "bounded-search", k.steps, chain)
        return EqualityVerdict(False, "bounded-search", k.steps, _trace_lines(k))
    finally:
        k._leave()


def equal_judgments(j1: Judgment, j2: Judgment, kernel: Optional[Kernel] = None) -> bool:
    return deep((kernel or Kernel()).judgment_eq)(j1, j2)


__all__ = ["NormalForm", "EqualityVerdict", "normalize", "equal", "equal_judgments",
           "ResourceExhausted", "SEARCH_NODE_BUDGET"]
