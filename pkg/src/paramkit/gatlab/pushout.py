"""Pushouts of (reflexive) graphs and the two commutation checks for the
forgetful functor: initial objects and pushouts.

Graph pushouts are computed componentwise, as connected components of the
gluing relation on the disjoint union.  Reflexive-graph pushouts are built
separately, as the quotient of a presentation by constructors: one vertex and
edge constructor per leg, a formal ``r`` per vertex class, and the gluing
equations.  Comparing the two through ``U`` is then a genuine check.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .homs import GraphHom, SizeLimit, is_graph_hom
from .models import EndoSet, FiniteGraph, FiniteGroup, FiniteMonoid, FiniteReflexiveGraph, ModelError

ISO_BUDGET = 10 ** 6


@dataclass(frozen=True)
class Span:
    d: object
    c1: object
    c2: object
    f1: GraphHom
    f2: GraphHom


def _graph(g) -> FiniteGraph:
    return g.graph if isinstance(g, FiniteReflexiveGraph) else g


def _edges(g: FiniteGraph) -> list[tuple]:
    return [(u, v, e) for (u, v), es in g.edges.items() for e in es]


def _label(members) -> str:
    return "+".join(sorted(f"{i}.{x}" for i, x in members))


def validate_span(span: Span, kind: str) -> None:
    for f, c, name in ((span.f1, span.c1, "f1"), (span.f2, span.c2, "f2")):
        if kind == "rgraph" and not isinstance(c, FiniteReflexiveGraph):
            raise ModelError("rgraph pushouts need reflexive graphs")
        if not is_graph_hom(f, span.d, c):
            raise ModelError(f"{name} is not a {kind} homomorphism")


# -- componentwise graph pushout ---------------------------------------------------

def _classes(items: list, pairs: list[tuple[int, int]]) -> list[int]:
    n = len(items)
    if not n:
        return []
    rows = [a for a, _ in pairs]
    cols = [b for _, b in pairs]
    adj = coo_matrix((np.ones(len(pairs)), (rows, cols)), shape=(n, n))
    return connected_components(adj, directed=False)[1].tolist()


def pushout_graph(span: Span) -> tuple[FiniteGraph, GraphHom, GraphHom]:
    """Pushout of the underlying graphs, with its two coprojections."""
    gd, g1, g2 = _graph(span.d), _graph(span.c1), _graph(span.c2)
    vs = [(1, v) for v in g1.vertices] + [(2, v) for v in g2.vertices]
    vi = {x: i for i, x in enumerate(vs)}
    f1v, f2v, f1e, f2e = span.f1.v, span.f2.v, span.f1.e, span.f2.e
    comp = _classes(vs, [(vi[(1, f1v[d])], vi[(2, f2v[d])]) for d in gd.vertices])
    vmembers = defaultdict(list)
    for x, c in zip(vs, comp):
        vmembers[c].append(x)
    vlab = {c: _label(m) for c, m in vmembers.items()}
    vclass = {x: vlab[c] for x, c in zip(vs, comp)}

    es = [(1, e) for e in _edges(g1)] + [(2, e) for e in _edges(g2)]
    ei = {(i, e[2]): k for k, (i, e) in enumerate(es)}
    pairs = [(ei[(1, f1e[d])], ei[(2, f2e[d])]) for d in _edges(gd)]
    ecomp = _classes(es, pairs)
    emembers = defaultdict(list)
    for (i, e), c in zip(es, ecomp):
        emembers[c].append((i, e[2]))
    elab = {c: _label(m) for c, m in emembers.items()}
    edges = defaultdict(list)
    ends = {}
    for (i, (u, v, e)), c in zip(es, ecomp):
        key = (vclass[(i, u)], vclass[(i, v)])
        assert ends.setdefault(c, key) == key, "glued edges have glued endpoints"
    for c in sorted(ends, key=lambda c: elab[c]):
        edges[ends[c]].append(elab[c])
    verts = tuple(sorted(set(vclass.values())))
    po = FiniteGraph(verts, dict(edges))
    eclass = {(i, e): elab[c] for (i, (_, _, e)), c in zip(es, ecomp)}
    legs = []
    for i, g in ((1, g1), (2, g2)):
        legs.append(GraphHom.make({v: vclass[(i, v)] for v in g.vertices},
                                  {(u, v, e): eclass[(i, e)] for (u, v, e) in _edges(g)}))
    return po, legs[0], legs[1]


# -- reflexive graph pushout from a presentation ------------------------------------

def _closure(nodes: list, rel: Mapping) -> dict:
    """Equivalence classes of the symmetric closure of ``rel`` by breadth-first search."""
    cls = {}
    for x in nodes:
        if x in cls:
            continue
        comp, queue = [x], deque([x])
        cls[x] = None
        while queue:
            y = queue.popleft()
            for z in rel.get(y, ()):
                if z not in cls:
                    cls[z] = None
                    comp.append(z)
                    queue.append(z)
        for y in comp:
            cls[y] = tuple(comp)
    return cls


def pushout_rgraph(span: Span) -> tuple[FiniteReflexiveGraph, GraphHom, GraphHom]:
    d, c1, c2 = span.d, span.c1, span.c2
    legs = ((1, c1, span.f1), (2, c2, span.f2))
    rel = defaultdict(set)

    def glue(x, y):
        rel[x].add(y)
        rel[y].add(x)

    # vertex constructors and their gluing
    vnodes = [(i, v) for i, c, _ in legs for v in c.vertices]
    for x in d.vertices:
        glue((1, span.f1.v[x]), (2, span.f2.v[x]))
    vcls = _closure(vnodes, rel)
    vname = {x: _label(vcls[x]) for x in vnodes}
    classes = sorted(set(vname.values()))

    # edges: the r constructor of a leg is sent to the formal r of its class
    def norm(i, c, edge):
        u, v, e = edge
        if u == v and c.refl[u] == e:
            return ("r", vname[(i, u)])
        return ("e", i, e)

    rel.clear()
    enodes = [("r", x) for x in classes]
    ends = {("r", x): (x, x) for x in classes}
    for i, c, _ in legs:
        for edge in _edges(c.graph):
            n = norm(i, c, edge)
            if n[0] == "e":
                enodes.append(n)
                ends[n] = (vname[(i, edge[0])], vname[(i, edge[1])])
    byid = [{e: (u, v, e) for (u, v, e) in _edges(c.graph)} for _, c, _ in legs]
    for edge in _edges(d.graph):
        a = norm(1, c1, byid[0][span.f1.e[edge]])
        b = norm(2, c2, byid[1][span.f2.e[edge]])
        glue(a, b)
    ecls = _closure(enodes, rel)

    def ename(n) -> str:
        parts = []
        for m in ecls[n]:
            parts.append(f"r[{m[1]}]" if m[0] == "r" else f"{m[1]}.{m[2]}")
        return "+".join(sorted(parts))

    edges = defaultdict(set)
    for n in enodes:
        key = ends[n]
        for m in ecls[n]:
            assert ends[m] == key, "r is preserved by both legs, so glued edges agree on endpoints"
        edges[key].add(ename(n))
    refl = {x: ename(("r", x)) for x in classes}
    g = FiniteGraph(tuple(classes), {k: tuple(sorted(v)) for k, v in edges.items()})
    po = FiniteReflexiveGraph(g, refl)
    out = []
    for i, c, _ in legs:
        out.append(GraphHom.make({v: vname[(i, v)] for v in c.vertices},
                                 {edge: ename(norm(i, c, edge)) for edge in _edges(c.graph)}))
    return po, out[0], out[1]


def pushout(kind: str, span: Span):
    """The pushout object together with its coprojections."""
    validate_span(span, kind)
    if kind == "graph":
        return pushout_graph(span)
    if kind == "rgraph":
        return pushout_rgraph(span)
    raise ValueError(f"unknown pushout kind {kind!r}")


def forget_span(span: Span) -> Span:
    return Span(_graph(span.d), _graph(span.c1), _graph(span.c2), span.f1, span.f2)


# -- isomorphism search -------------------------------------------------------------

@dataclass
class Isomorphism:
    vmap: dict
    emap: dict  # source edge id → target edge id, per vertex pair
    candidates: int


def _signature(g: FiniteGraph, v) -> tuple:
    m = g.multiplicity()
    i = g.vertices.index(v)
    return int(m[i, i]), tuple(sorted(m[i].tolist())), tuple(sorted(m[:, i].tolist()))


def find_isomorphism(g: FiniteGraph, h: FiniteGraph, budget: int = ISO_BUDGET) -> Optional[Isomorphism]:
    """Backtracking over vertex bijections, pruned by (loops, out-, in-degree) signatures."""
    g, h = _graph(g), _graph(h)
    if len(g.vertices) != len(h.vertices) or g.edge_count != h.edge_count:
        return None
    mg, mh = g.multiplicity(), h.multiplicity()
    n = len(g.vertices)
    sg = [_signature(g, v) for v in g.vertices]
    sh = [_signature(h, v) for v in h.vertices]
    if sorted(sg) != sorted(sh):
        return None
    order = sorted(range(n), key=lambda i: sum(1 for s in sg if s == sg[i]))
    assign = [-1] * n
    used = [False] * n
    tried = 0

    def extend(k: int) -> bool:
        nonlocal tried
        if k == n:
            return True
        i = order[k]
        for j in range(n):
            if used[j] or sh[j] != sg[i]:
                continue
            tried += 1
            if tried > budget:
                raise SizeLimit(tried, budget)
            ok = all(mg[i, order[q]] == mh[j, assign[order[q]]] and mg[order[q], i] == mh[assign[order[q]], j]
                     for q in range(k)) and mg[i, i] == mh[j, j]
            if not ok:
                continue
            assign[i], used[j] = j, True
            if extend(k + 1):
                return True
            assign[i], used[j] = -1, False
        return False

    if not extend(0):
        return None
    vmap = {g.vertices[i]: h.vertices[assign[i]] for i in range(n)}
    emap = {}
    for (u, v), es in g.edges.items():
        for a, b in zip(es, h.out(vmap[u], vmap[v])):
            emap[(u, v, a)] = b
    return Isomorphism(vmap, emap, tried)


@dataclass
class CommuteReport:
    check: str
    isomorphic: bool
    witness: Optional[Isomorphism] = None
    lhs: object = field(default=None, repr=False)
    rhs: object = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.isomorphic

    def as_json(self) -> dict:
        d = {"check": self.check, "isomorphic": self.isomorphic}
        if self.witness is not None:
            d["witness"] = {"vertices": {str(k): str(v) for k, v in self.witness.vmap.items()},
                            "edges": {str(k[2]): str(v) for k, v in self.witness.emap.items()},
                            "candidates": self.witness.candidates}
        return d


def commute_pushout_check(span: Span, budget: int = ISO_BUDGET) -> CommuteReport:
    """``U(pushout_rgraph(span)) ≅ pushout_graph(U(span))``."""
    lhs = pushout("rgraph", span)[0].graph
    rhs = pushout("graph", forget_span(span))[0]
    iso = find_isomorphism(lhs, rhs, budget)
    return CommuteReport("pushout", iso is not None, iso, lhs, rhs)


def initial(theory: str):
    if theory == "graph":
        return FiniteGraph((), {})
    if theory == "rgraph":
        return FiniteReflexiveGraph(FiniteGraph((), {}), {})
    if theory == "monoid":
        return FiniteMonoid.trivial()
    if theory == "group":
        return FiniteGroup.from_monoid(FiniteMonoid.trivial())
    if theory == "endo":
        return EndoSet((), np.zeros(0, dtype=np.int64))
    if theory == "set":
        return ()
    raise ValueError(f"no initial model for {theory!r}")


def commute_initial_check(kind: str) -> CommuteReport:
    """``U`` of the initial richer model is the initial base model."""
    if kind in ("rgraph", "graph-rgraph"):
        lhs, rhs = initial("rgraph").graph, initial("graph")
        iso = find_isomorphism(lhs, rhs)
        return CommuteReport("initial/rgraph", iso is not None, iso, lhs, rhs)
    if kind in ("monoid-group", "group"):
        lhs, rhs = initial("group").monoid, initial("monoid")
        ok = lhs.order == rhs.order == 1
        return CommuteReport("initial/monoid-group", ok, None, lhs, rhs)
    if kind == "endo":
        lhs, rhs = initial("endo").carrier, initial("set")
        return CommuteReport("initial/endo", len(lhs) == len(rhs) == 0, None, lhs, rhs)
    raise ValueError(f"unknown commutation kind {kind!r}")


# -- JSON legs and random spans -----------------------------------------------------

def hom_from_json(d: Mapping, src, dst) -> GraphHom:
    """``{"vertices": {v: v'}, "edges": {edge-id: edge-id}}``."""
    g = _graph(src)
    vnames = {str(v): v for v in g.vertices}
    tv = {str(v): v for v in _graph(dst).vertices}
    try:
        vmap = {vnames[k]: tv[str(x)] for k, x in d["vertices"].items()}
        emap = {(u, v, e): d.get("edges", {})[str(e)] for (u, v, e) in _edges(g)}
    except KeyError as e:
        raise ModelError(f"leg map is not total: {e.args[0]!r}") from None
    if set(vmap) != set(g.vertices):
        raise ModelError("leg map is not total on vertices")
    return GraphHom.make(vmap, emap)


def random_rgraph_span(rng: np.random.Generator, max_vertices: int = 4, max_extra: int = 2) -> Span:
    """A random span of reflexive graphs with at most ``max_vertices`` vertices each."""
    nd = int(rng.integers(0, max_vertices + 1))
    d = _random_rgraph(rng, "d", nd, max_extra)
    legs = []
    for side in ("a", "b"):
        nc = int(rng.integers(1 if nd else 0, max_vertices + 1))
        c_vertices = [f"{side}{i}" for i in range(nc)]
        phi = {v: c_vertices[int(rng.integers(0, nc))] for v in d.vertices}
        edges = defaultdict(list)
        refl = {}
        for v in c_vertices:
            refl[v] = f"{side}r{v}"
            edges[(v, v)].append(refl[v])
        emap = {}
        fresh = 0
        for (u, v, e) in _edges(d.graph):
            key = (phi[u], phi[v])
            if u == v and d.refl[u] == e:
                emap[(u, v, e)] = refl[phi[u]]
                continue
            if edges[key] and rng.random() < 0.4:
                emap[(u, v, e)] = edges[key][int(rng.integers(0, len(edges[key])))]
            else:
                fresh += 1
                name = f"{side}e{fresh}"
                edges[key].append(name)
                emap[(u, v, e)] = name
        for _ in range(int(rng.integers(0, max_extra + 1))):
            if not nc:
                break
            u, v = c_vertices[int(rng.integers(0, nc))], c_vertices[int(rng.integers(0, nc))]
            fresh += 1
            edges[(u, v)].append(f"{side}e{fresh}")
        c = FiniteReflexiveGraph(FiniteGraph(tuple(c_vertices), dict(edges)), refl)
        legs.append((c, GraphHom.make(phi, emap)))
    return Span(d, legs[0][0], legs[1][0], legs[0][1], legs[1][1])


def _random_rgraph(rng: np.random.Generator, prefix: str, n: int, max_extra: int) -> FiniteReflexiveGraph:
    vs = [f"{prefix}{i}" for i in range(n)]
    edges = defaultdict(list)
    refl = {}
    for v in vs:
        refl[v] = f"{prefix}r{v}"
        edges[(v, v)].append(refl[v])
    for k in range(int(rng.integers(0, max_extra + 1)) if n else 0):
        u, v = vs[int(rng.integers(0, n))], vs[int(rng.integers(0, n))]
        edges[(u, v)].append(f"{prefix}e{k}")
    return FiniteReflexiveGraph(FiniteGraph(tuple(vs), dict(edges)), refl)


__all__ = ["Span", "pushout", "pushout_graph", "pushout_rgraph", "forget_span", "validate_span",
           "Isomorphism", "find_isomorphism", "CommuteReport", "commute_pushout_check",
           "commute_initial_check", "initial", "hom_from_json", "random_rgraph_span", "ISO_BUDGET"]
