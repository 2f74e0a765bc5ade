"""Small models up to isomorphism, hom counting, and the exhaustive sweeps.

Isomorphism classes are found by canonical forms: the lexicographically least
relabelled table (or multiplicity matrix) over all permutations.  Hom-set sizes
are isomorphism invariant, so sweeping one representative per class covers
every model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product
from typing import Iterator

import numpy as np

from .adjoints import (
    graph_right_adjoint, monoid_units, sample_streams, transpose_counit_failures, triangle_failures,
)
from .homs import hom_enum
from .models import EndoSet, FiniteGraph, FiniteGroup, FiniteMonoid, FiniteReflexiveGraph, StreamAlgebra


# -- monoids and groups ----------------------------------------------------------------

def _monoid_canon(tab: np.ndarray) -> bytes:
    n = tab.shape[0]
    best = None
    for rest in permutations(range(1, n)):
        p = np.array((0,) + rest)  # the unit stays at index 0
        inv = np.argsort(p)
        key = inv[tab[p[:, None], p[None, :]]].tobytes()
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def _monoid_tables(n: int) -> tuple:
    """One associative table per isomorphism class, unit at index 0."""
    if n < 1:
        return ()
    free = [(i, j) for i in range(1, n) for j in range(1, n)]
    seen, out = set(), []
    ar = np.arange(n)
    for vals in product(range(n), repeat=len(free)):
        tab = np.empty((n, n), dtype=np.int64)
        tab[0], tab[:, 0] = ar, ar
        for (i, j), v in zip(free, vals):
            tab[i, j] = v
        if not np.array_equal(tab[tab], tab[ar[:, None, None], tab[None, :, :]]):
            continue
        key = _monoid_canon(tab)
        if key not in seen:
            seen.add(key)
            out.append(tab)
    return tuple(out)


def monoids_up_to_iso(n: int) -> list[FiniteMonoid]:
    return [FiniteMonoid(tuple(range(n)), 0, t) for t in _monoid_tables(n)]


def groups_up_to_iso(n: int) -> list[FiniteGroup]:
    out = []
    for m in monoids_up_to_iso(n):
        if monoid_units(m).order == n:
            out.append(FiniteGroup.from_monoid(m))
    return out


# -- graphs and reflexive graphs ---------------------------------------------------------

def _matrix_canon(m: np.ndarray) -> bytes:
    n = m.shape[0]
    return min(m[np.ix_(p, p)].tobytes() for p in map(list, permutations(range(n)))) if n else b""


@lru_cache(maxsize=None)
def multiplicity_classes(n: int, max_mult: int, min_loop: int = 0) -> tuple:
    """Multiplicity matrices up to simultaneous permutation, loops at least ``min_loop``."""
    seen, out = set(), []
    ranges = [range(min_loop, max_mult + 1) if i == j else range(max_mult + 1)
              for i in range(n) for j in range(n)]
    for vals in product(*ranges):
        m = np.array(vals, dtype=np.int64).reshape(n, n)
        key = _matrix_canon(m)
        if key not in seen:
            seen.add(key)
            out.append(m)
    return tuple(out)


def graphs_up_to_iso(max_vertices: int = 3, max_mult: int = 2) -> Iterator[FiniteGraph]:
    for n in range(max_vertices + 1):
        for m in multiplicity_classes(n, max_mult):
            yield FiniteGraph.from_multiplicity(m)


def rgraph_from_multiplicity(m: np.ndarray) -> FiniteReflexiveGraph:
    """Loops at every vertex are interchangeable, so the first one serves as ``r``."""
    g = FiniteGraph.from_multiplicity(m)
    return FiniteReflexiveGraph(g, {v: g.out(v, v)[0] for v in g.vertices})


def rgraphs_up_to_iso(max_vertices: int = 3, max_mult: int = 2) -> Iterator[FiniteReflexiveGraph]:
    for n in range(max_vertices + 1):
        for m in multiplicity_classes(n, max_mult, min_loop=1):
            yield rgraph_from_multiplicity(m)


def _vertex_maps(n_src: int, n_dst: int) -> np.ndarray:
    if n_src == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(product(range(n_dst), repeat=n_src)), dtype=np.int64).reshape(-1, n_src)


def count_homs(exponent: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """``Σ_φ Π_{u,v} T[φu, φv]^{K[u,v]}`` for each target ``T`` in a batch.

    With ``K`` the source multiplicity this counts graph homs; with ``K = m − I``
    and ``T`` the multiplicity of a reflexive target it counts rgraph homs,
    since the reflexivity loop's image is forced.
    """
    targets = np.asarray(targets, dtype=np.int64)
    k = np.asarray(exponent, dtype=np.int64)
    batch, nt = targets.shape[0], targets.shape[1]
    phi = _vertex_maps(k.shape[0], nt)
    if nt == 0 and k.shape[0] > 0:
        return np.zeros(batch, dtype=np.int64)
    vals = targets[:, phi[:, :, None], phi[:, None, :]]  # (batch, maps, n, n)
    return np.prod(vals ** k, axis=(2, 3)).sum(axis=1)


# -- sweeps ---------------------------------------------------------------------------------

@dataclass
class SweepReport:
    name: str
    cases: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.cases > 0


def monoid_group_sweep(max_order: int = 3) -> SweepReport:
    """``|Hom_Grp(G, M^×)| = |Hom_Mon(U G, M)|`` over all classes of order ≤ ``max_order``."""
    groups = [g for n in range(1, max_order + 1) for g in groups_up_to_iso(n)]
    monoids = [m for n in range(1, max_order + 1) for m in monoids_up_to_iso(n)]
    rep = SweepReport("monoid-group", 0)
    for g, m in product(groups, monoids):
        lhs = len(hom_enum("group", g, monoid_units(m)))
        rhs = len(hom_enum("monoid", g.monoid, m))
        rep.cases += 1
        if lhs != rhs:
            rep.failures.append((g.monoid.table.tolist(), m.table.tolist(), lhs, rhs))
    return rep


def graph_rgraph_sweep(max_vertices: int = 3, max_mult: int = 2) -> SweepReport:
    """``|Hom_RGph(A, C(B))| = |Hom_Gph(U A, B)|`` over all classes within the bounds.

    ``C(B)`` is built explicitly for every ``B``; the counts are vectorized over
    all ``B`` sharing the same ``|C(B)|`` (resp. ``|B|``).
    """
    bs = list(graphs_up_to_iso(max_vertices, max_mult))
    by_nb: dict[int, list[int]] = {}
    by_nc: dict[int, list[int]] = {}
    cmats = []
    bmats = [b.multiplicity() for b in bs]
    for i, b in enumerate(bs):
        c = graph_right_adjoint(b)
        cm = c.graph.multiplicity()
        cmats.append(cm)
        by_nb.setdefault(len(b.vertices), []).append(i)
        by_nc.setdefault(cm.shape[0], []).append(i)
    bstack = {n: np.stack([bmats[i] for i in ids]) if n else np.zeros((len(ids), 0, 0), dtype=np.int64)
              for n, ids in by_nb.items()}
    cstack = {n: np.stack([cmats[i] for i in ids]) if n else np.zeros((len(ids), 0, 0), dtype=np.int64)
              for n, ids in by_nc.items()}
    rep = SweepReport("graph-rgraph", 0)
    for a in rgraphs_up_to_iso(max_vertices, max_mult):
        ma = a.graph.multiplicity()
        k = ma - np.eye(ma.shape[0], dtype=np.int64)
        rhs = np.zeros(len(bs), dtype=np.int64)
        lhs = np.zeros(len(bs), dtype=np.int64)
        for n, ids in by_nb.items():
            rhs[ids] = count_homs(ma, bstack[n])
        for n, ids in by_nc.items():
            lhs[ids] = count_homs(k, cstack[n])
        rep.cases += len(bs)
        for i in np.nonzero(lhs != rhs)[0]:
            rep.failures.append((ma.tolist(), bmats[i].tolist(), int(lhs[i]), int(rhs[i])))
    return rep


def endo_triangle_sweep(max_y: int = 4, max_x: int = 4, depth: int = 32) -> SweepReport:
    """Triangle identities for every ``(Y, s)`` with ``|Y| ≤ max_y``, every ``|X| ≤ max_x``
    and every ``g : Y → X``, on all carrier points."""
    rep = SweepReport("endo-triangles", 0)
    for nx in range(max_x + 1):
        x = tuple(f"x{i}" for i in range(nx))
        bad_eps = transpose_counit_failures(StreamAlgebra(x, depth), sample_streams(x))
        if bad_eps:
            rep.failures.append(("counit transpose", nx, bad_eps))
        for ny in range(max_y + 1):
            gs = _vertex_maps(ny, nx) if (ny == 0 or nx) else np.zeros((0, ny), dtype=np.int64)
            for s in product(range(ny), repeat=ny):
                y = EndoSet(tuple(range(ny)), np.array(s, dtype=np.int64))
                bc, bh = triangle_failures(y.endo, gs, depth)
                rep.cases += len(gs)
                if bc or bh:
                    rep.failures.append((s, nx, bc, bh))
    return rep


__all__ = ["monoids_up_to_iso", "groups_up_to_iso", "graphs_up_to_iso", "rgraphs_up_to_iso",
           "multiplicity_classes", "rgraph_from_multiplicity", "count_homs", "SweepReport",
           "monoid_group_sweep", "graph_rgraph_sweep", "endo_triangle_sweep"]
