import random

import pytest
from hypothesis import given, settings, strategies as st

from paramkit import Kernel, catalogue, judgment_of_star, star, typecheck, verify_axiom
from paramkit.appendix import AxiomInstance
from paramkit.param import star_in, star_monitored
from paramkit.syntax import (
    El, Empty, Ext, GenCtx, GenSub, Id, Pi, Sort, StarCtx, StarSub, StarTy, SubT, Term, Top, Univ,
    nodes, vr, wk,
)
from paramkit.typecheck import CtxOk, SubBetween, TmOf, TyIn, TypeCheckError, deep

from termgen import TermGen, random_term

E = Empty()
G, D = GenCtx("G"), GenCtx("D")
GG = Ext(G, StarCtx(G))


def test_empty_star_is_top():
    assert star(E) is Top(E)


def test_id_star_is_variable():
    assert star(Id(G)) is vr(GG)


def test_univ_star():
    # Π (El v) 𝒰 over (G, G*, 𝒰[w])
    u = star(Univ(G))
    ctx = Ext(GG, SubT(Univ(G), wk(GG)))
    assert u is Pi(El(vr(ctx)), Univ(Ext(ctx, El(vr(ctx)))))


def test_generator_stays_symbolic():
    s = GenSub("s", G, D)
    assert star(s) is StarSub(s)
    assert star(G) is StarCtx(G)


def test_star_judgment_shapes():
    k = Kernel()
    assert judgment_of_star(G, CtxOk(), k) == TyIn(G)
    a = Top(G)
    assert k.judgment_eq(judgment_of_star(a, TyIn(G), k), TyIn(Ext(GG, SubT(a, wk(GG)))))
    s = GenSub("s", G, D)
    j = judgment_of_star(s, SubBetween(G, D), k)
    assert isinstance(j, TmOf) and j.ctx is GG


def test_ill_formed_star_rejected():
    bad = Term("starty", Top(G))
    with pytest.raises(TypeCheckError) as e:
        star(bad)
    assert e.value.kind == "IllFormedStar"


def test_star_of_star_is_formal():
    assert star(StarCtx(G)) is StarTy(StarCtx(G))


@deep
def _sound(t: Term) -> bool:
    k = Kernel()
    j = k.typecheck(t)
    return k.judgment_eq(k.typecheck(star_in(k, t)), k.judgment_of_star(t, j))


@pytest.mark.parametrize("sort", list(Sort), ids=lambda s: s.value)
def test_typing_soundness_fixed_seeds(sort):
    terms = [random_term(seed, sort) for seed in range(100)]
    assert all(t.depth <= 6 for t in terms)
    assert max(t.depth for t in terms) == 6
    bad = [i for i, t in enumerate(terms) if not _sound(t)]
    assert bad == []


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from(list(Sort)))
def test_typing_soundness(seed, sort):
    assert _sound(random_term(seed, sort))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from(list(Sort)))
def test_recursion_bounded_by_depth(seed, sort):
    t = random_term(seed, sort)
    _, level = star_monitored(t)
    assert level <= t.depth


def _instantiate(t: Term, ctxs: dict) -> Term:
    """Replace context generators by closed contexts, rebuilding bottom-up."""
    out: dict = {}
    for u in nodes(t):
        if u.tag == "genctx" and u.args[0] in ctxs:
            out[u] = ctxs[u.args[0]]
        else:
            out[u] = Term(u.tag, *[out[a] if isinstance(a, Term) else a for a in u.args])
    return out[t]


_CTX_NAMES = ("G", "D", "T", "W")


@pytest.mark.parametrize("seed", range(6))
def test_equality_preserved_under_instantiation(seed):
    rng = random.Random(seed)
    gen = TermGen(rng, 2)
    ctxs = {n: gen.ctx(2) for n in _CTX_NAMES}
    failures = []
    for ax in catalogue():
        lhs, rhs = _instantiate(ax.lhs, ctxs), _instantiate(ax.rhs, ctxs)
        inst = AxiomInstance(ax.id, lhs, rhs, typecheck(lhs), ax.statement)
        r = verify_axiom(inst)
        if not r.passed:
            failures.append((ax.id, r.status, r.message))
    assert failures == []


def test_derived_equations_commute_with_star():
    for ax in catalogue("derived"):
        assert verify_axiom(ax).passed, ax.id
