"""Exhaustive homomorphism enumeration between finite models."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Union

import numpy as np

from .models import EndoSet, FiniteGraph, FiniteGroup, FiniteMonoid, FiniteReflexiveGraph

DEFAULT_BUDGET = 10 ** 7
_CHUNK = 1 << 16


class SizeLimit(Exception):
    def __init__(self, candidates: int, budget: int):
        self.candidates, self.budget = candidates, budget
        super().__init__(f"{candidates} candidate maps exceed the budget of {budget}")


@dataclass(frozen=True)
class AlgHom:
    """A map of carriers, stored as target indices."""
    images: tuple

    def __call__(self, i: int) -> int:
        return self.images[i]

    def labelled(self, src, dst) -> dict:
        return {src.carrier[i]: dst.carrier[j] for i, j in enumerate(self.images)}


@dataclass(frozen=True)
class GraphHom:
    vmap: tuple  # pairs (source vertex, target vertex)
    emap: tuple  # pairs ((u, v, edge), target edge)

    @property
    def v(self) -> dict:
        return dict(self.vmap)

    @property
    def e(self) -> dict:
        return dict(self.emap)

    @classmethod
    def make(cls, vmap: dict, emap: dict) -> "GraphHom":
        return cls(tuple(vmap.items()), tuple(emap.items()))


Hom = Union[AlgHom, GraphHom]


def _maps(n_src: int, n_dst: int, budget: int):
    """All maps ``n_src → n_dst`` as index arrays, lexicographic, in chunks."""
    total = n_dst ** n_src
    if total > budget:
        raise SizeLimit(total, budget)
    if n_src == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    radix = n_dst ** np.arange(n_src - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        ids = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        yield (ids[:, None] // radix[None, :]) % n_dst


def _monoid_homs(a: FiniteMonoid, b: FiniteMonoid, budget: int) -> list[AlgHom]:
    out = []
    for f in _maps(a.order, b.order, budget):
        ok = f[:, a.e] == b.e
        lhs = f[:, a.table]  # f(x·y)
        rhs = b.table[f[:, :, None], f[:, None, :]]  # f(x)·f(y)
        ok &= np.all(lhs == rhs, axis=(1, 2))
        out.extend(AlgHom(tuple(int(x) for x in row)) for row in f[ok])
    return out


def _endo_homs(a: EndoSet, b: EndoSet, budget: int) -> list[AlgHom]:
    out = []
    for f in _maps(len(a.carrier), len(b.carrier), budget):
        ok = np.all(f[:, a.endo] == b.endo[f], axis=1)
        out.extend(AlgHom(tuple(int(x) for x in row)) for row in f[ok])
    return out


def _graph_homs(a: FiniteGraph, b: FiniteGraph, budget: int, refl_a=None, refl_b=None) -> list[GraphHom]:
    va, vb = a.vertices, b.vertices
    nv = len(vb) ** len(va)
    if nv > budget:
        raise SizeLimit(nv, budget)
    edges = [(u, v, e) for (u, v), es in a.edges.items() for e in es]
    forced = set()
    if refl_a is not None:
        forced = {(v, v, e) for v, e in refl_a.items()}
    out: list[GraphHom] = []
    seen = nv
    for images in product(vb, repeat=len(va)):
        phi = dict(zip(va, images))
        choices = []
        for (u, v, e) in edges:
            if (u, v, e) in forced:
                choices.append((refl_b[phi[u]],))
            else:
                choices.append(b.out(phi[u], phi[v]))
        count = 1
        for c in choices:
            count *= len(c)
        seen += count
        if seen > budget:
            raise SizeLimit(seen, budget)
        for pick in product(*choices):
            out.append(GraphHom.make(phi, dict(zip(edges, pick))))
    return out


def hom_enum(theory: str, a, b, budget: int = DEFAULT_BUDGET) -> list[Hom]:
    """All homomorphisms ``a → b`` of the given theory, in a deterministic order."""
    if theory == "monoid":
        return _monoid_homs(_as_monoid(a), _as_monoid(b), budget)
    if theory == "group":
        # a monoid map between groups preserves inverses automatically
        if not (isinstance(a, FiniteGroup) and isinstance(b, FiniteGroup)):
            raise TypeError("group homs need two FiniteGroup models")
        return _monoid_homs(a.monoid, b.monoid, budget)
    if theory == "endo":
        return _endo_homs(a, b, budget)
    if theory == "graph":
        return _graph_homs(_as_graph(a), _as_graph(b), budget)
    if theory == "rgraph":
        if not (isinstance(a, FiniteReflexiveGraph) and isinstance(b, FiniteReflexiveGraph)):
            raise TypeError("rgraph homs need two FiniteReflexiveGraph models")
        return _graph_homs(a.graph, b.graph, budget, a.refl, b.refl)
    raise ValueError(f"unknown theory {theory!r}")


def _as_monoid(m) -> FiniteMonoid:
    return m.monoid if isinstance(m, FiniteGroup) else m


def _as_graph(g) -> FiniteGraph:
    return g.graph if isinstance(g, FiniteReflexiveGraph) else g


def is_graph_hom(h: GraphHom, a, b) -> bool:
    ga, gb = _as_graph(a), _as_graph(b)
    v, e = h.v, h.e
    if set(v) != set(ga.vertices) or any(x not in gb.vertices for x in v.values()):
        return False
    want = {(u, w, x) for (u, w), es in ga.edges.items() for x in es}
    if set(e) != want:
        return False
    for (u, w, x), y in e.items():
        if y not in gb.out(v[u], v[w]):
            return False
    if isinstance(a, FiniteReflexiveGraph) and isinstance(b, FiniteReflexiveGraph):
        return all(e[(u, u, r)] == b.refl[v[u]] for u, r in a.refl.items())
    return True


__all__ = ["SizeLimit", "AlgHom", "GraphHom", "hom_enum", "is_graph_hom", "DEFAULT_BUDGET"]
