"""Proof kernel for a CwF type theory with a unary parametricity translation."""

from .appendix import AxiomInstance, CheckResult, catalogue, run_appendix, verify_axiom
from .equality import EqualityVerdict, NormalForm, equal, normalize
from .nbe import ResourceExhausted
from .param import star
from .syntax import Sort, Term, parse, print_dag, print_term, read, render, validate
from .tower import TowerLevel, TowerReport, flatten_telescope, tower
from .typecheck import (
    CtxOk, Judgment, Kernel, SubBetween, TmOf, TyIn, TypeCheckError, judgment_of_star, typecheck,
)

__all__ = [
    "Sort", "Term", "parse", "print_term", "print_dag", "read", "render", "validate",
    "Kernel", "typecheck", "judgment_of_star", "Judgment", "CtxOk", "TyIn", "SubBetween", "TmOf",
    "TypeCheckError", "ResourceExhausted",
    "normalize", "equal", "NormalForm", "EqualityVerdict",
    "star", "AxiomInstance", "CheckResult", "catalogue", "verify_axiom", "run_appendix",
    "tower", "flatten_telescope", "TowerLevel", "TowerReport",
]
