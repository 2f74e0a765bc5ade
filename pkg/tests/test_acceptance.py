"""Acceptance gate.  One PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from paramkit import Kernel, catalogue, equal, tower
from paramkit.appendix import mutable_ids, run_appendix
from paramkit.gatlab import (
    FiniteMonoid, commute_initial_check, commute_pushout_check, monoid_units, random_rgraph_span,
)
from paramkit.gatlab.enumerate import endo_triangle_sweep, graph_rgraph_sweep, monoid_group_sweep
from paramkit.param import star_in
from paramkit.syntax import Ext, GenCtx, Sort, StarCtx, SubT, telescope, wk
from paramkit.typecheck import TyIn, deep

from termgen import random_term

LINES: dict[int, str] = {}


def _report(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    LINES[n] = line
    print(line)
    assert ok, line


def _zn(n: int) -> FiniteMonoid:
    return FiniteMonoid.from_json({"carrier": list(range(n)), "unit": 1,
                                   "table": [[a * b % n for b in range(n)] for a in range(n)]})


def test_c1_appendix_reproduction():
    # a separate interpreter, so no cache is warm
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "paramkit", "appendix", "--json"],
                          capture_output=True, text=True)
    dt = time.perf_counter() - t0
    rows = json.loads(proc.stdout)
    npass = sum(r["status"] == "pass" for r in rows)
    ok = proc.returncode == 0 and npass == len(rows) == len(catalogue()) and dt < 10
    _report(1, ok, f"{npass}/{len(rows)} axioms pass in {dt:.2f}s (limit 10s)")


def test_c2_mutation_sensitivity():
    ids = mutable_ids()
    exact = [i for i in ids if [r.id for r in run_appendix(mutate=i) if not r.passed] == [i]]
    ok = len(ids) >= 5 and exact == ids
    _report(2, ok, f"{len(exact)}/{len(ids)} mutants fail exactly their own axiom (need >= 5)")


@deep
def _sound(t) -> bool:
    k = Kernel()
    j = k.typecheck(t)
    return k.judgment_eq(k.typecheck(star_in(k, t)), k.judgment_of_star(t, j))


def test_c3_star_typing_soundness():
    per_sort = 60
    terms = [random_term(seed, sort) for sort in Sort for seed in range(per_sort)]
    good = sum(_sound(t) for t in terms)
    depth = max(t.depth for t in terms)
    ok = len(terms) >= 200 and good == len(terms) and depth <= 6
    _report(3, ok, f"{good}/{len(terms)} random terms over 4 sorts, max depth {depth}")


def test_c4_axiom_closure():
    cat = catalogue()
    bad = [ax.id for ax in cat if not equal(ax.lhs, ax.rhs, ax.judgment).equal]
    derived = [ax.id for ax in cat if ax.derived]
    ok = not bad and len(derived) == 3
    _report(4, ok, f"{len(cat) - len(bad)}/{len(cat)} equations decide equal, "
                   f"{len(derived)} derived" + (f"; failing {bad}" if bad else ""))


@deep
def _tower_checks():
    x = GenCtx("X")
    t0 = time.perf_counter()
    rep = tower(4)
    k = Kernel()
    typed = all(isinstance(j := k.typecheck(lv.body), TyIn) and k.ctx_eq(j.ctx, lv.ambient)
                for lv in rep.levels)
    dt = time.perf_counter() - t0
    l1, l2 = rep.levels[0], rep.levels[1]
    gg = Ext(x, StarCtx(x))
    exact = (l1.ambient is x and l1.body is StarCtx(x)
             and l2.ambient is Ext(gg, SubT(StarCtx(x), wk(gg))))
    tel = [len(telescope(lv.ambient)[1]) for lv in rep.levels]
    return exact, tel, typed, dt


def test_c5_tower_fidelity():
    exact, tel, typed, dt = _tower_checks()
    ok = exact and tel == [0, 2, 4, 6] and typed and dt < 60
    _report(5, ok, f"levels 1-2 exact={exact}, telescope {tel}, typed={typed}, dim 4 in {dt:.3f}s")


def test_c6_monoid_adjoint():
    o6, o5 = monoid_units(_zn(6)).order, monoid_units(_zn(5)).order
    sweep = monoid_group_sweep(3)
    ok = o6 == 2 and o5 == 4 and sweep.ok
    _report(6, ok, f"|units Z/6|={o6}, |units Z/5|={o5}, "
                   f"{sweep.cases} group/monoid pairs, {len(sweep.failures)} failures")


def test_c7_graph_adjoint():
    s = graph_rgraph_sweep(3, 2)
    _report(7, s.ok, f"{s.cases} (rgraph, graph) pairs up to 3 vertices, multiplicity 2, "
                     f"{len(s.failures)} failures")


def test_c8_pushout_commutation():
    rng = np.random.default_rng(8)
    reps = [commute_pushout_check(random_rgraph_span(rng, 4)) for _ in range(60)]
    witnessed = sum(r.ok and r.witness is not None for r in reps)
    inits = [commute_initial_check(kind).ok for kind in ("rgraph", "monoid-group", "endo")]
    ok = witnessed == len(reps) >= 50 and all(inits)
    _report(8, ok, f"{witnessed}/{len(reps)} spans with witnesses, "
                   f"{sum(inits)}/3 initial-object checks")


def test_c9_stream_triangles():
    s = endo_triangle_sweep(4, 4, 32)
    _report(9, s.ok, f"{s.cases} (Y, g) cases at depth 32, {len(s.failures)} failures")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
