from itertools import permutations, product
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paramkit.gatlab import (
    EndoSet, FiniteGraph, FiniteGroup, FiniteMonoid, FiniteReflexiveGraph, GraphHom, ModelError,
    SizeLimit, Span, Stream, adjunction_check, commute_initial_check, commute_pushout_check,
    endo_right_adjoint, find_isomorphism, forget, graph_right_adjoint, groups_up_to_iso, hom_enum,
    monoid_units, monoids_up_to_iso, pushout, random_rgraph_span,
)
from paramkit.gatlab.enumerate import count_homs, multiplicity_classes
from paramkit.gatlab.homs import is_graph_hom


# -- independent oracles ------------------------------------------------------------

def brute_units(carrier, op, e):
    return [m for m in carrier if any(op(m, n) == e and op(n, m) == e for n in carrier)]


def brute_monoid_homs(a: FiniteMonoid, b: FiniteMonoid) -> int:
    n, count = a.order, 0
    for f in product(range(b.order), repeat=n):
        if f[a.e] != b.e:
            continue
        if all(f[int(a.table[x, y])] == int(b.table[f[x], f[y]]) for x in range(n) for y in range(n)):
            count += 1
    return count


def brute_graph_homs(a: FiniteGraph, b: FiniteGraph) -> int:
    total = 0
    for img in product(b.vertices, repeat=len(a.vertices)):
        f = dict(zip(a.vertices, img))
        ways = 1
        for (u, v), es in a.edges.items():
            ways *= len(b.out(f[u], f[v])) ** len(es)
        total += ways
    return total


def burnside(n: int, diag: int, off: int) -> int:
    """Orbits of n×n matrices under simultaneous permutation, with ``diag`` values
    allowed on the diagonal and ``off`` elsewhere."""
    if n == 0:
        return 1
    total = 0
    for p in permutations(range(n)):
        seen, d_cyc, o_cyc = set(), 0, 0
        for i, j in product(range(n), repeat=2):
            if (i, j) in seen:
                continue
            x = (i, j)
            while x not in seen:
                seen.add(x)
                x = (p[x[0]], p[x[1]])
            if i == j:
                d_cyc += 1
            else:
                o_cyc += 1
        total += diag ** d_cyc * off ** o_cyc
    assert total % factorial(n) == 0
    return total // factorial(n)


def valid_iso(iso, g: FiniteGraph, h: FiniteGraph) -> bool:
    vm = iso.vmap
    if sorted(map(str, vm.values())) != sorted(map(str, h.vertices)) or set(vm) != set(g.vertices):
        return False
    for u, v in product(g.vertices, repeat=2):
        src = g.out(u, v)
        img = [iso.emap[(u, v, e)] for e in src]
        if sorted(img) != sorted(h.out(vm[u], vm[v])):
            return False
    return True


def looped(n_vertices: int, k: int) -> FiniteGraph:
    return FiniteGraph(tuple(range(n_vertices)), {(v, v): tuple(f"l{v}_{i}" for i in range(k))
                                                  for v in range(n_vertices)})


# -- monoids and groups ---------------------------------------------------------------

@pytest.mark.parametrize("n,order", [(6, 2), (5, 4), (1, 1), (8, 4), (7, 6)])
def test_units_of_zmod(n, order):
    m = FiniteMonoid.zmod_mul(n)
    u = monoid_units(m)
    want = brute_units(range(n), lambda x, y: x * y % n, 1 % n)
    assert u.order == order == len(want)
    assert sorted(u.carrier) == sorted(m.carrier[i] for i in want)


def test_units_are_a_group_with_inverse_laws():
    u = monoid_units(FiniteMonoid.zmod_mul(15))
    t, inv, e = u.monoid.table, u.inverse, u.monoid.e
    for x in range(u.order):
        assert t[x, inv[x]] == e == t[inv[x], x]
        for y in range(u.order):
            assert inv[t[x, y]] == t[inv[y], inv[x]]
    assert inv[e] == e


def test_units_of_zmod5_is_cyclic():
    u = monoid_units(FiniteMonoid.zmod_mul(5))
    t = u.monoid.table
    orders = []
    for x in range(4):
        k, y = 1, x
        while y != u.monoid.e:
            y, k = int(t[y, x]), k + 1
        orders.append(k)
    assert max(orders) == 4


def test_trivial_monoid_units():
    assert monoid_units(FiniteMonoid.trivial()).order == 1


def test_monoid_validation():
    with pytest.raises(ModelError):
        FiniteMonoid((0, 1), 0, np.array([[0, 1], [1, 1]]) * 0)  # no unit
    with pytest.raises(ModelError):
        FiniteGroup.from_monoid(FiniteMonoid.zmod_mul(4))


def test_hom_zmod2_into_zmod6_mul():
    a, b = FiniteMonoid.zmod_add(2), FiniteMonoid.zmod_mul(6)
    homs = hom_enum("monoid", a, b)
    assert len(homs) == brute_monoid_homs(a, b) == 2
    assert sorted(b.carrier[h(1)] for h in homs) == [1, 5]


def test_hom_from_one_point():
    one = FiniteMonoid.trivial()
    for m in monoids_up_to_iso(3):
        assert len(hom_enum("monoid", one, m)) == 1


def test_iso_class_counts():
    assert [len(monoids_up_to_iso(n)) for n in (1, 2, 3)] == [1, 2, 7]
    assert [len(groups_up_to_iso(n)) for n in (1, 2, 3)] == [1, 1, 1]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_monoid_homs_against_brute_force(n):
    ms = monoids_up_to_iso(n)
    for a, b in product(ms, repeat=2):
        assert len(hom_enum("monoid", a, b)) == brute_monoid_homs(a, b)


def test_adjunction_zmod2_zmod6():
    rep = adjunction_check("monoid-group", FiniteGroup.cyclic(2), FiniteMonoid.zmod_mul(6))
    assert rep.ok and rep.lhs_count == rep.rhs_count == 2
    assert rep.witnesses


def test_adjunction_trivial_group():
    g = FiniteGroup.cyclic(1)
    for m in monoids_up_to_iso(3):
        rep = adjunction_check("monoid-group", g, m)
        assert rep.ok and rep.lhs_count == rep.rhs_count == 1


# -- graphs ---------------------------------------------------------------------------

def test_graph_right_adjoint_example():
    g = FiniteGraph(("a", "b"), {("a", "a"): ("l",), ("a", "b"): ("f",)})
    c = graph_right_adjoint(g)
    assert c.vertices == (("a", "l"),)
    assert c.edges == {(("a", "l"), ("a", "l")): ("l",)}
    assert c.refl == {("a", "l"): "l"}


def test_graph_right_adjoint_empty():
    c = graph_right_adjoint(FiniteGraph((), {}))
    assert c.vertices == () and c.edges == {}


def test_graph_right_adjoint_two_loops_each():
    c = graph_right_adjoint(looped(2, 2))
    assert len(c.vertices) == 4
    for (p, q), es in c.edges.items():
        assert p[0] == q[0]
        assert set(es) == {f"l{p[0]}_0", f"l{p[0]}_1"}
    assert len(c.edges) == 8


def test_hom_from_isolated_vertex():
    pt = FiniteGraph(("x",), {})
    g = FiniteGraph((1, 2, 3), {(1, 2): ("a", "b")})
    assert len(hom_enum("graph", pt, g)) == 3


@pytest.mark.parametrize("k,m", [(1, 1), (2, 3), (3, 2), (1, 4)])
def test_graph_adjunction_km(k, m):
    a = FiniteReflexiveGraph(FiniteGraph(("x",), {("x", "x"): ("r",)}), {"x": "r"})
    rep = adjunction_check("graph-rgraph", a, looped(m, k))
    assert rep.ok and rep.lhs_count == rep.rhs_count == k * m


def test_graph_hom_counts_against_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(40):
        na, nb = rng.integers(0, 4, size=2)
        ma, mb = rng.integers(0, 3, size=(na, na)), rng.integers(0, 3, size=(nb, nb))
        a, b = FiniteGraph.from_multiplicity(ma), FiniteGraph.from_multiplicity(mb)
        want = brute_graph_homs(a, b)
        assert len(hom_enum("graph", a, b)) == want
        assert int(count_homs(ma, mb[None])[0]) == want


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_class_counts_match_burnside(n):
    assert len(multiplicity_classes(n, 2)) == burnside(n, 3, 3)
    assert len(multiplicity_classes(n, 2, min_loop=1)) == burnside(n, 2, 3)


def test_forget():
    g = looped(1, 1)
    r = FiniteReflexiveGraph(g, {0: "l0_0"})
    assert forget(r) is g
    assert forget(FiniteGroup.cyclic(2)).order == 2


def test_size_limit():
    big = FiniteMonoid.zmod_mul(12)
    with pytest.raises(SizeLimit):
        hom_enum("monoid", big, big, budget=1000)
    g = looped(6, 1)
    with pytest.raises(SizeLimit):
        hom_enum("graph", g, g, budget=100)


# -- streams --------------------------------------------------------------------------

def test_shift_alternating():
    c = endo_right_adjoint(("a", "b"), 16)
    f = Stream.periodic("ab")
    assert c.shift(f).prefix(6) == tuple("bababa")
    assert c.equal(c.shift(c.shift(f)), f)


def test_constant_stream_fixed():
    c = endo_right_adjoint(("c",), 10)
    f = Stream.periodic("c")
    assert c.equal(c.shift(f), f)


def test_transpose_of_identity_on_z3():
    y = EndoSet((0, 1, 2), np.array([1, 2, 0]))
    c = endo_right_adjoint((0, 1, 2), 8)
    tr = c.transpose(y, lambda v: v)
    assert tr(0).prefix(7) == (0, 1, 2, 0, 1, 2, 0)
    assert tr(2).prefix(4) == (2, 0, 1, 2)
    assert c.counit(tr(1)) == 1


def test_endo_adjunction_report():
    y = EndoSet((0, 1, 2), np.array([1, 2, 0]))
    rep = adjunction_check("endo", y, ("a", "b"), depth=32)
    assert rep.ok and rep.lhs_count == rep.rhs_count == 8 and rep.depth == 32
    with pytest.raises(ModelError):
        adjunction_check("endo", y, ("a",), depth=0)


# -- colimits -------------------------------------------------------------------------

def _single_edge(p, u, v):
    return FiniteGraph((u, v), {(u, v): (p,)})


def test_pushout_empty_apex_is_disjoint_union():
    d = FiniteGraph((), {})
    c1, c2 = _single_edge("e", "a", "b"), _single_edge("f", "c", "d")
    f = GraphHom.make({}, {})
    po, l1, l2 = pushout("graph", Span(d, c1, c2, f, f))
    assert len(po.vertices) == 4 and po.edge_count == 2


def test_pushout_path_of_length_two():
    d = FiniteGraph(("p",), {})
    c1, c2 = _single_edge("e", "a", "b"), _single_edge("f", "c", "d")
    po, l1, l2 = pushout("graph", Span(d, c1, c2, GraphHom.make({"p": "b"}, {}),
                                       GraphHom.make({"p": "c"}, {})))
    path = FiniteGraph(("x", "y", "z"), {("x", "y"): ("1",), ("y", "z"): ("2",)})
    assert find_isomorphism(po, path) is not None
    assert l1.v["b"] == l2.v["c"]
    assert is_graph_hom(l1, c1, po) and is_graph_hom(l2, c2, po)


def _loop_rgraph(v, e):
    return FiniteReflexiveGraph(FiniteGraph((v,), {(v, v): (e,)}), {v: e})


def test_rgraph_pushout_glues_loops():
    d = _loop_rgraph("p", "rp")
    c1, c2 = _loop_rgraph("a", "ra"), _loop_rgraph("b", "rb")
    span = Span(d, c1, c2, GraphHom.make({"p": "a"}, {("p", "p", "rp"): "ra"}),
                GraphHom.make({"p": "b"}, {("p", "p", "rp"): "rb"}))
    po, _, _ = pushout("rgraph", span)
    assert len(po.vertices) == 1 and po.graph.edge_count == 1
    rep = commute_pushout_check(span)
    assert rep.ok and valid_iso(rep.witness, rep.lhs, rep.rhs)


def test_pushout_rejects_non_homomorphism():
    d = FiniteGraph(("p", "q"), {("p", "q"): ("e",)})
    c = FiniteGraph(("a",), {})
    bad = GraphHom.make({"p": "a", "q": "a"}, {("p", "q", "e"): "zz"})
    with pytest.raises(ModelError):
        pushout("graph", Span(d, c, c, bad, bad))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_spans_commute(seed):
    span = random_rgraph_span(np.random.default_rng(seed))
    assert len(span.c1.vertices) <= 4 and len(span.c2.vertices) <= 4
    rep = commute_pushout_check(span)
    assert rep.ok
    assert valid_iso(rep.witness, rep.lhs, rep.rhs)


def test_empty_apex_spans_commute():
    rng = np.random.default_rng(11)
    for _ in range(20):
        span = random_rgraph_span(rng)
        empty = FiniteReflexiveGraph(FiniteGraph((), {}), {})
        f = GraphHom.make({}, {})
        assert commute_pushout_check(Span(empty, span.c1, span.c2, f, f)).ok


@pytest.mark.parametrize("kind", ["rgraph", "monoid-group", "endo"])
def test_initial_objects(kind):
    assert commute_initial_check(kind).ok


def test_isomorphism_search_negative_and_budget():
    assert find_isomorphism(looped(2, 1), FiniteGraph((0, 1), {(0, 0): ("a", "b")})) is None
    g = FiniteGraph(tuple(range(7)), {})
    with pytest.raises(SizeLimit):
        find_isomorphism(g, g, budget=3)
