"""Finite models of the toy theories, their right adjoints, and desk-scale
checks of the adjunction bijection and of colimit commutation."""

from .adjoints import (
    AdjunctionReport, adjunction_check, endo_right_adjoint, forget, graph_right_adjoint, monoid_units,
)
from .enumerate import (
    endo_triangle_sweep, graph_rgraph_sweep, graphs_up_to_iso, groups_up_to_iso, monoid_group_sweep,
    monoids_up_to_iso, rgraphs_up_to_iso,
)
from .homs import AlgHom, GraphHom, SizeLimit, hom_enum
from .models import (
    EndoSet, FiniteGraph, FiniteGroup, FiniteMonoid, FiniteReflexiveGraph, ModelError, Stream,
    StreamAlgebra, load_model, model_from_json,
)
from .pushout import (
    CommuteReport, Span, commute_initial_check, commute_pushout_check, find_isomorphism, pushout,
    random_rgraph_span,
)

__all__ = [
    "FiniteMonoid", "FiniteGroup", "FiniteGraph", "FiniteReflexiveGraph", "EndoSet", "Stream",
    "StreamAlgebra", "ModelError", "load_model", "model_from_json",
    "AlgHom", "GraphHom", "SizeLimit", "hom_enum",
    "monoid_units", "graph_right_adjoint", "endo_right_adjoint", "forget", "AdjunctionReport",
    "adjunction_check",
    "Span", "pushout", "commute_pushout_check", "commute_initial_check", "find_isomorphism",
    "CommuteReport", "random_rgraph_span",
    "monoids_up_to_iso", "groups_up_to_iso", "graphs_up_to_iso", "rgraphs_up_to_iso",
    "monoid_group_sweep", "graph_rgraph_sweep", "endo_triangle_sweep",
]
