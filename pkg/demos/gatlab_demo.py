"""Right adjoints and pushouts on small finite models."""

import numpy as np

from paramkit.gatlab import (
    FiniteGraph, FiniteMonoid, FiniteReflexiveGraph, adjunction_check, commute_pushout_check, graph_right_adjoint,
    monoid_units, random_rgraph_span,
)


def zn(n):
    return FiniteMonoid.from_json({"carrier": list(range(n)), "unit": 1,
                                   "table": [[a * b % n for b in range(n)] for a in range(n)]})


# the group of units is the right adjoint to forgetting inverses
for n in (5, 6, 8):
    u = monoid_units(zn(n))
    print(f"units of Z/{n} under x: {list(u.carrier)} (order {u.order})")

# the graph adjoint adds a free choice of loop at every vertex
g = FiniteGraph.from_json({"vertices": ["a", "b"], "edges": {"a,a": ["l"], "a,b": ["f"]}})
c = graph_right_adjoint(g)
print(f"C(G): {len(c.vertices)} vertices, {c.graph.edge_count} edges")
a = FiniteReflexiveGraph.from_json({"vertices": ["x", "y"],
                                   "edges": {"x,x": ["rx"], "y,y": ["ry"], "x,y": ["e"]},
                                   "refl": {"x": "rx", "y": "ry"}})
rep = adjunction_check("graph-rgraph", a, g)
print(f"|Hom(A, C(G))| = {rep.lhs_count}, |Hom(U A, G)| = {rep.rhs_count}")

# forgetting reflexivity commutes with pushouts, with an explicit witness
rng = np.random.default_rng(0)
for _ in range(3):
    r = commute_pushout_check(random_rgraph_span(rng, 4))
    print("pushout commutes:", r.ok, "witness:", r.as_json().get("witness", {}).get("vertices"))
