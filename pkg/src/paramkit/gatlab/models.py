"""Finite models of the toy theories: monoids, groups, graphs, reflexive graphs,
sets with an endofunction, and depth-bounded stream algebras.

Algebraic models store their operation on element indices ``0..n-1``;
``carrier`` keeps the user-facing labels in the same order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Hashable, Mapping, Sequence

import numpy as np


class ModelError(ValueError):
    pass


def _index(labels: Sequence[Hashable]) -> dict:
    idx = {x: i for i, x in enumerate(labels)}
    if len(idx) != len(labels):
        raise ModelError("duplicate element ids")
    return idx


@dataclass(frozen=True, eq=False)
class FiniteMonoid:
    carrier: tuple
    unit: Hashable
    table: np.ndarray  # table[i, j] = index of carrier[i]·carrier[j]

    def __post_init__(self):
        n = len(self.carrier)
        tab = np.asarray(self.table, dtype=np.int64)
        object.__setattr__(self, "carrier", tuple(self.carrier))
        object.__setattr__(self, "table", tab)
        idx = _index(self.carrier)
        if n == 0:
            raise ModelError("a monoid needs a unit")
        if tab.shape != (n, n) or tab.min() < 0 or tab.max() >= n:
            raise ModelError("table must be a total n×n operation on the carrier")
        if self.unit not in idx:
            raise ModelError("unit is not in the carrier")
        e = idx[self.unit]
        ar = np.arange(n)
        if not (np.array_equal(tab[e], ar) and np.array_equal(tab[:, e], ar)):
            raise ModelError("unit laws fail")
        if not np.array_equal(tab[tab], tab[ar[:, None, None], tab[None, :, :]]):
            raise ModelError("operation is not associative")

    @property
    def order(self) -> int:
        return len(self.carrier)

    @property
    def e(self) -> int:
        return self.carrier.index(self.unit)

    def mul(self, x, y):
        i, j = self.carrier.index(x), self.carrier.index(y)
        return self.carrier[self.table[i, j]]

    @classmethod
    def from_function(cls, carrier: Sequence, unit, op: Callable) -> "FiniteMonoid":
        idx = _index(carrier)
        tab = [[idx[op(x, y)] for y in carrier] for x in carrier]
        return cls(tuple(carrier), unit, np.array(tab, dtype=np.int64))

    @classmethod
    def zmod_mul(cls, n: int) -> "FiniteMonoid":
        return cls.from_function(range(n), 1 % n, lambda x, y: (x * y) % n)

    @classmethod
    def zmod_add(cls, n: int) -> "FiniteMonoid":
        return cls.from_function(range(n), 0, lambda x, y: (x + y) % n)

    @classmethod
    def trivial(cls) -> "FiniteMonoid":
        return cls(("e",), "e", np.zeros((1, 1), dtype=np.int64))

    def to_json(self) -> dict:
        return {"carrier": list(self.carrier), "unit": self.unit,
                "table": [[self.carrier[k] for k in row] for row in self.table.tolist()]}

    @classmethod
    def from_json(cls, d: Mapping) -> "FiniteMonoid":
        carrier = list(d["carrier"])
        idx = _index(carrier)
        try:
            tab = [[idx[x] for x in row] for row in d["table"]]
        except KeyError as e:
            raise ModelError(f"table entry {e.args[0]!r} is not in the carrier") from None
        return cls(tuple(carrier), d["unit"], np.array(tab, dtype=np.int64).reshape(len(carrier), len(carrier)))


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    monoid: FiniteMonoid
    inverse: np.ndarray  # inverse[i] = index of carrier[i]⁻¹

    def __post_init__(self):
        inv = np.asarray(self.inverse, dtype=np.int64)
        object.__setattr__(self, "inverse", inv)
        m = self.monoid
        n, e, tab = m.order, m.e, m.table
        ar = np.arange(n)
        if inv.shape != (n,):
            raise ModelError("inverse must be total")
        if not (np.all(tab[ar, inv] == e) and np.all(tab[inv, ar] == e)):
            raise ModelError("inverse laws fail")
        # derivable laws, asserted: e⁻¹ = e and (m·n)⁻¹ = n⁻¹·m⁻¹
        assert inv[e] == e
        assert np.array_equal(inv[tab], tab[inv[None, :], inv[:, None]])

    @property
    def carrier(self) -> tuple:
        return self.monoid.carrier

    @property
    def order(self) -> int:
        return self.monoid.order

    @classmethod
    def from_monoid(cls, m: FiniteMonoid) -> "FiniteGroup":
        n, e, tab = m.order, m.e, m.table
        inv = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            js = np.nonzero((tab[i] == e) & (tab[:, i] == e))[0]
            if len(js) != 1:
                raise ModelError(f"{m.carrier[i]!r} has no unique two-sided inverse")
            inv[i] = js[0]
        return cls(m, inv)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls.from_monoid(FiniteMonoid.zmod_add(n))

    def to_json(self) -> dict:
        return self.monoid.to_json()


@dataclass(frozen=True, eq=False)
class FiniteGraph:
    vertices: tuple
    edges: dict  # (u, v) -> tuple of edge ids
    unique_ids: bool = True

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        vs = _index(self.vertices)
        clean = {}
        seen = set()
        for (u, v), es in self.edges.items():
            if u not in vs or v not in vs:
                raise ModelError(f"edge family ({u!r},{v!r}) mentions an unknown vertex")
            es = tuple(es)
            if len(set(es)) != len(es):
                raise ModelError(f"duplicate edge ids between {u!r} and {v!r}")
            if self.unique_ids:
                for x in es:
                    if x in seen:
                        raise ModelError(f"edge id {x!r} used twice")
                    seen.add(x)
            if es:
                clean[(u, v)] = es
        object.__setattr__(self, "edges", clean)

    def out(self, u, v) -> tuple:
        return self.edges.get((u, v), ())

    def multiplicity(self) -> np.ndarray:
        n = len(self.vertices)
        m = np.zeros((n, n), dtype=np.int64)
        idx = _index(self.vertices)
        for (u, v), es in self.edges.items():
            m[idx[u], idx[v]] = len(es)
        return m

    @property
    def edge_count(self) -> int:
        return sum(len(es) for es in self.edges.values())

    @classmethod
    def from_multiplicity(cls, m: np.ndarray, prefix: str = "e") -> "FiniteGraph":
        n = m.shape[0]
        edges = {}
        for u, v in product(range(n), repeat=2):
            if m[u, v]:
                edges[(u, v)] = tuple(f"{prefix}{u}_{v}_{k}" for k in range(int(m[u, v])))
        return cls(tuple(range(n)), edges)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": {f"{u},{v}": list(es) for (u, v), es in self.edges.items()}}

    @classmethod
    def from_json(cls, d: Mapping) -> "FiniteGraph":
        vertices = list(d["vertices"])
        by_name = {str(v): v for v in vertices}
        edges = {}
        for key, es in d.get("edges", {}).items():
            parts = key.split(",")
            if len(parts) != 2 or parts[0] not in by_name or parts[1] not in by_name:
                raise ModelError(f"bad edge key {key!r}")
            edges[(by_name[parts[0]], by_name[parts[1]])] = tuple(es)
        return cls(tuple(vertices), edges)


@dataclass(frozen=True, eq=False)
class FiniteReflexiveGraph:
    graph: FiniteGraph
    refl: dict  # v -> edge id in edges(v, v)

    def __post_init__(self):
        g = self.graph
        if set(self.refl) != set(g.vertices):
            raise ModelError("r must be defined on every vertex")
        for v, e in self.refl.items():
            if e not in g.out(v, v):
                raise ModelError(f"r({v!r}) = {e!r} is not a loop at {v!r}")

    @property
    def vertices(self) -> tuple:
        return self.graph.vertices

    @property
    def edges(self) -> dict:
        return self.graph.edges

    def to_json(self) -> dict:
        d = self.graph.to_json()
        d["refl"] = {str(v): e for v, e in self.refl.items()}
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "FiniteReflexiveGraph":
        g = FiniteGraph.from_json(d)
        by_name = {str(v): v for v in g.vertices}
        refl = {}
        for k, e in d.get("refl", {}).items():
            if k not in by_name:
                raise ModelError(f"refl mentions unknown vertex {k!r}")
            refl[by_name[k]] = e
        return cls(g, refl)


@dataclass(frozen=True, eq=False)
class EndoSet:
    carrier: tuple
    endo: np.ndarray  # endo[i] = index of s(carrier[i])

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))
        _index(self.carrier)
        s = np.asarray(self.endo, dtype=np.int64).reshape(-1)
        n = len(self.carrier)
        if s.shape != (n,) or (n and (s.min() < 0 or s.max() >= n)):
            raise ModelError("endo must be a total map on the carrier")
        object.__setattr__(self, "endo", s)

    def apply(self, x):
        return self.carrier[self.endo[self.carrier.index(x)]]

    def to_json(self) -> dict:
        return {"carrier": list(self.carrier),
                "map": {str(x): self.carrier[self.endo[i]] for i, x in enumerate(self.carrier)}}

    @classmethod
    def from_json(cls, d: Mapping) -> "EndoSet":
        carrier = list(d["carrier"])
        idx = _index(carrier)
        m = {str(k): v for k, v in d.get("map", {}).items()}
        try:
            s = [idx[m[str(x)]] for x in carrier]
        except KeyError as e:
            raise ModelError(f"map is not total or lands outside the carrier: {e.args[0]!r}") from None
        return cls(tuple(carrier), np.array(s, dtype=np.int64))


class Stream:
    """A stream over a finite alphabet, computed on demand and cached."""

    __slots__ = ("fn", "_cache")

    def __init__(self, fn: Callable[[int], Any]):
        self.fn = fn
        self._cache: dict[int, Any] = {}

    def __call__(self, n: int):
        if n < 0:
            raise IndexError("stream positions are natural numbers")
        hit = self._cache.get(n)
        if hit is None and n not in self._cache:
            hit = self._cache[n] = self.fn(n)
        return hit

    def prefix(self, k: int) -> tuple:
        return tuple(self(i) for i in range(k))

    @classmethod
    def periodic(cls, word: Sequence) -> "Stream":
        word = tuple(word)
        return cls(lambda n: word[n % len(word)])


@dataclass
class StreamAlgebra:
    """``C(X) = ℕ → X`` with the shift, observed up to ``depth`` positions."""

    base: tuple
    depth: int
    materialized: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.depth < 1:
            raise ModelError("depth must be at least 1")
        self.base = tuple(self.base)

    @staticmethod
    def shift(f: Stream) -> Stream:
        return Stream(lambda n: f(n + 1))

    @staticmethod
    def counit(f: Stream):
        return f(0)

    def equal(self, f: Stream, g: Stream, depth: int | None = None) -> bool:
        k = self.depth if depth is None else depth
        return f.prefix(k) == g.prefix(k)

    def transpose(self, y_model: EndoSet, g: Callable) -> Callable[[Any], Stream]:
        """``y ↦ (n ↦ g(sⁿ y))`` for ``g : Y → X``."""
        def at(y):
            def nth(n):
                cur = y
                for _ in range(n):
                    cur = y_model.apply(cur)
                return g(cur)
            return Stream(nth)
        return at


def load_model(path: str, theory: str):
    with open(path) as fh:
        d = json.load(fh)
    return model_from_json(d, theory)


def model_from_json(d: Mapping, theory: str):
    if theory == "monoid":
        return FiniteMonoid.from_json(d)
    if theory == "group":
        return FiniteGroup.from_monoid(FiniteMonoid.from_json(d))
    if theory == "graph":
        return FiniteGraph.from_json(d)
    if theory == "rgraph":
        return FiniteReflexiveGraph.from_json(d)
    if theory == "endo":
        return EndoSet.from_json(d)
    raise ModelError(f"unknown theory {theory!r}")


__all__ = [
    "ModelError", "FiniteMonoid", "FiniteGroup", "FiniteGraph", "FiniteReflexiveGraph",
    "EndoSet", "Stream", "StreamAlgebra", "load_model", "model_from_json",
]
