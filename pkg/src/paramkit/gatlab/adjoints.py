"""Closed-form right adjoints of the three forgetful functors, and brute-force
checks of the adjunction bijection ``Hom(A, C(B)) ≅ Hom(U(A), B)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .homs import DEFAULT_BUDGET, AlgHom, GraphHom, SizeLimit, hom_enum, is_graph_hom
from .models import (
    EndoSet, FiniteGraph, FiniteGroup, FiniteMonoid, FiniteReflexiveGraph, ModelError, Stream,
    StreamAlgebra,
)

MAX_WITNESSES = 5


def monoid_units(m: FiniteMonoid) -> FiniteGroup:
    """The group of two-sided invertible elements."""
    n, e, tab = m.order, m.e, m.table
    both = (tab == e) & (tab.T == e)  # both[i, j]: i·j = j·i = e
    units = [i for i in range(n) if both[i].any()]
    for i in units:
        assert both[i].sum() == 1, "two-sided inverses are unique in a monoid"
    pos = {i: k for k, i in enumerate(units)}
    sub = np.array([[pos[int(tab[i, j])] for j in units] for i in units], dtype=np.int64)
    inv = np.array([pos[int(np.nonzero(both[i])[0][0])] for i in units], dtype=np.int64)
    um = FiniteMonoid(tuple(m.carrier[i] for i in units), m.unit, sub.reshape(len(units), len(units)))
    return FiniteGroup(um, inv)


def graph_right_adjoint(g: FiniteGraph) -> FiniteReflexiveGraph:
    """Vertices are loops ``(v, e)``; an edge ``(v,e) → (v',e')`` is an edge ``v → v'``.

    Edge ids are shared with ``g``, so the result is built with ``unique_ids=False``.
    """
    verts = tuple((v, e) for v in g.vertices for e in g.out(v, v))
    edges = {}
    for a, b in product(verts, repeat=2):
        es = g.out(a[0], b[0])
        if es:
            edges[(a, b)] = es
    return FiniteReflexiveGraph(FiniteGraph(verts, edges, unique_ids=False), {x: x[1] for x in verts})


def endo_right_adjoint(base: Sequence, depth: int) -> StreamAlgebra:
    return StreamAlgebra(tuple(base), depth)


def forget(a):
    """The forgetful functor on objects."""
    if isinstance(a, FiniteGroup):
        return a.monoid
    if isinstance(a, FiniteReflexiveGraph):
        return a.graph
    if isinstance(a, EndoSet):
        return a.carrier
    raise TypeError(f"no forgetful functor for {type(a).__name__}")


@dataclass
class AdjunctionReport:
    kind: str
    lhs_count: int  # |Hom(A, C(B))|, or the number of transposes checked
    rhs_count: int  # |Hom(U(A), B)|
    bijection: bool
    witnesses: list = field(default_factory=list)
    depth: Optional[int] = None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.bijection and self.lhs_count == self.rhs_count and not self.failures

    def as_json(self) -> dict:
        d = {"kind": self.kind, "lhs_count": self.lhs_count, "rhs_count": self.rhs_count,
             "bijection": self.bijection, "ok": self.ok, "witnesses": self.witnesses}
        if self.depth is not None:
            d["depth"] = self.depth
        if self.failures:
            d["failures"] = self.failures
        return d


def _gkey(h: GraphHom):
    return frozenset(h.vmap), frozenset(h.emap)


def _monoid_group(a: FiniteGroup, b: FiniteMonoid, budget: int) -> AdjunctionReport:
    units = monoid_units(b)
    incl = [b.carrier.index(x) for x in units.carrier]
    pos = {j: k for k, j in enumerate(incl)}
    lhs = hom_enum("group", a, units, budget)
    rhs = hom_enum("monoid", a.monoid, b, budget)
    lset, rset = set(lhs), set(rhs)

    def down(h: AlgHom) -> AlgHom:  # compose with the inclusion of units
        return AlgHom(tuple(incl[i] for i in h.images))

    def up(h: AlgHom) -> Optional[AlgHom]:  # corestrict; images of group elements are invertible
        if any(i not in pos for i in h.images):
            return None
        return AlgHom(tuple(pos[i] for i in h.images))

    failures = []
    for h in lhs:
        d = down(h)
        if d not in rset or up(d) != h:
            failures.append(f"transpose of {h.labelled(a, units)} is not inverse")
    for h in rhs:
        u = up(h)
        if u is None or u not in lset or down(u) != h:
            failures.append(f"{h.labelled(a, b)} does not corestrict to the units")
    wit = [{"lhs": {str(k): v for k, v in h.labelled(a, units).items()},
            "rhs": {str(k): v for k, v in down(h).labelled(a, b).items()}} for h in lhs[:MAX_WITNESSES]]
    return AdjunctionReport("monoid-group", len(lhs), len(rhs), not failures, wit, failures=failures)


def _graph_rgraph(a: FiniteReflexiveGraph, b: FiniteGraph, budget: int) -> AdjunctionReport:
    cb = graph_right_adjoint(b)
    lhs = hom_enum("rgraph", a, cb, budget)
    rhs = hom_enum("graph", a.graph, b, budget)
    lset, rset = {_gkey(h) for h in lhs}, {_gkey(h) for h in rhs}

    def down(h: GraphHom) -> GraphHom:
        return GraphHom.make({v: x[0] for v, x in h.vmap}, h.e)

    def up(h: GraphHom) -> GraphHom:
        v, e = h.v, h.e
        return GraphHom.make({x: (v[x], e[(x, x, a.refl[x])]) for x in a.vertices}, e)

    failures = []
    for h in lhs:
        d = down(h)
        if _gkey(d) not in rset or _gkey(up(d)) != _gkey(h) or not is_graph_hom(d, a.graph, b):
            failures.append(f"transpose of lhs hom {h.v} is not inverse")
    for h in rhs:
        u = up(h)
        if _gkey(u) not in lset or _gkey(down(u)) != _gkey(h) or not is_graph_hom(u, a, cb):
            failures.append(f"transpose of rhs hom {h.v} is not inverse")
    wit = [{"lhs": {str(k): str(x) for k, x in h.vmap}, "rhs": {str(k): str(x) for k, x in down(h).vmap}}
           for h in lhs[:MAX_WITNESSES]]
    return AdjunctionReport("graph-rgraph", len(lhs), len(rhs), not failures, wit, failures=failures)


def orbit_table(s: np.ndarray, depth: int) -> np.ndarray:
    """``O[n, y] = sⁿ(y)`` for ``n < depth``."""
    s = np.asarray(s, dtype=np.int64)
    o = np.empty((depth, len(s)), dtype=np.int64)
    o[0] = np.arange(len(s))
    for n in range(1, depth):
        o[n] = s[o[n - 1]]
    return o


def _as_batch(gs) -> np.ndarray:
    gs = np.asarray(gs, dtype=np.int64)
    return gs[None, :] if gs.ndim == 1 else gs


def transpose_table(s: np.ndarray, gs: np.ndarray, depth: int) -> np.ndarray:
    """``T[i, n, y] = gs[i](sⁿ y)``: transposes of a batch of maps ``Y → X``."""
    gs = _as_batch(gs)
    return gs[:, orbit_table(s, depth)]


def triangle_masks(s: np.ndarray, gs: np.ndarray, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Per map ``g``: does ``ε ∘ ĝ = g`` fail, and does ``ĝ`` fail to be a hom."""
    gs = _as_batch(gs)
    t = transpose_table(s, gs, depth)
    counit = np.any(t[:, 0, :] != gs, axis=1)
    # shift(ĝ(y)) agrees with ĝ(s y) on positions < depth-1
    if depth > 1:
        hom = np.any(t[:, 1:, :] != t[:, :-1, :][:, :, np.asarray(s)], axis=(1, 2))
    else:
        hom = np.zeros(len(gs), dtype=bool)
    return counit, hom


def triangle_failures(s: np.ndarray, gs: np.ndarray, depth: int) -> tuple[int, int]:
    counit, hom = triangle_masks(s, gs, depth)
    return int(counit.sum()), int(hom.sum())


def sample_streams(base: Sequence, max_period: int = 3, seed: int = 0, extra: int = 8) -> list[Stream]:
    """All periodic streams of period ≤ max_period plus a few pseudo-random ones."""
    base = tuple(base)
    out = []
    for p in range(1, max_period + 1):
        out.extend(Stream.periodic(w) for w in product(base, repeat=p))
    if base:
        rng = np.random.default_rng(seed)
        for _ in range(extra):
            word = [base[i] for i in rng.integers(0, len(base), size=97)]
            out.append(Stream(lambda n, w=tuple(word): w[(n * n + 3 * n) % len(w)]))
    return out


def transpose_counit_failures(c: StreamAlgebra, streams: Sequence[Stream]) -> int:
    """``transpose(ε)`` with respect to the shift should be the identity."""
    bad = 0
    k = c.depth
    for f in streams:
        def nth(n, f=f):
            g = f
            for _ in range(n):
                g = c.shift(g)
            return c.counit(g)
        if not c.equal(Stream(nth), f, k - 1 if k > 1 else 1):
            bad += 1
    return bad


def _endo(a: EndoSet, base: Sequence, depth: int, budget: int) -> AdjunctionReport:
    base = tuple(base)
    ny, nx = len(a.carrier), len(base)
    total = nx ** ny
    if total > budget:
        raise SizeLimit(total, budget)
    gs = np.array(list(product(range(nx), repeat=ny)), dtype=np.int64).reshape(total, ny)
    c = endo_right_adjoint(base, depth)
    failures = []
    counit, hom = triangle_masks(a.endo, gs, depth)
    bad_counit, bad_hom = int(counit.sum()), int(hom.sum())
    if bad_counit:
        failures.append(f"{bad_counit} maps g with ε∘ĝ ≠ g")
    if bad_hom:
        failures.append(f"{bad_hom} transposes fail to commute with the shift")
    # the transposes are pairwise distinct, i.e. g ↦ ĝ is injective
    t = transpose_table(a.endo, gs, depth).reshape(total, -1)
    transposes = {row.tobytes() for row in t}
    distinct = len(transposes) == total
    homs = {row.tobytes() for row, bad in zip(t, hom) if not bad}
    if not distinct:
        failures.append("two maps share a transpose")
    bad_eps = transpose_counit_failures(c, sample_streams(base))
    if bad_eps:
        failures.append(f"transpose(ε) differs from the identity on {bad_eps} sampled streams")
    # one witness through the on-demand stream API
    wit = []
    for g in gs[:MAX_WITNESSES]:
        gl = {a.carrier[i]: base[j] for i, j in enumerate(g)}
        tr = c.transpose(a, gl.__getitem__)
        wit.append({"g": {str(k): v for k, v in gl.items()},
                    "transpose": {str(y): list(tr(y).prefix(min(depth, 8))) for y in a.carrier}})
    return AdjunctionReport("endo", len(homs), total,
                            distinct and not failures, wit, depth=depth, failures=failures)


def adjunction_check(kind: str, a, b, depth: Optional[int] = None,
                     budget: int = DEFAULT_BUDGET) -> AdjunctionReport:
    """``kind`` is one of ``monoid-group``, ``graph-rgraph``, ``endo``.

    ``a`` is a model of the richer theory and ``b`` of the base theory (for
    ``endo``, ``b`` is the base set and ``depth`` the observation horizon).
    """
    if kind == "monoid-group":
        if not isinstance(a, FiniteGroup) or not isinstance(b, FiniteMonoid):
            raise TypeError("monoid-group needs a FiniteGroup and a FiniteMonoid")
        return _monoid_group(a, b, budget)
    if kind == "graph-rgraph":
        if not isinstance(a, FiniteReflexiveGraph) or not isinstance(b, FiniteGraph):
            raise TypeError("graph-rgraph needs a FiniteReflexiveGraph and a FiniteGraph")
        return _graph_rgraph(a, b, budget)
    if kind == "endo":
        if not isinstance(a, EndoSet):
            raise TypeError("endo needs an EndoSet")
        if depth is None or depth < 1:
            raise ModelError("endo adjunction needs depth ≥ 1")
        return _endo(a, b, depth, budget)
    raise ValueError(f"unknown adjunction {kind!r}")


__all__ = ["monoid_units", "graph_right_adjoint", "endo_right_adjoint", "forget",
           "AdjunctionReport", "adjunction_check", "orbit_table", "transpose_table",
           "triangle_masks", "triangle_failures", "sample_streams", "transpose_counit_failures"]
