import pytest

from paramkit import catalogue, run_appendix, verify_axiom
from paramkit.appendix import GROUPS, by_id, mutable_ids

GROUP_SIZES = {"sub": 8, "ty": 2, "unit": 3, "sigma": 5, "pi": 4, "univ": 8, "derived": 3}


@pytest.fixture(scope="module")
def results():
    return run_appendix()


def test_catalogue_shape():
    cat = catalogue()
    assert [g for g in GROUPS] == list(GROUP_SIZES)
    assert {g: len(catalogue(g)) for g in GROUPS} == GROUP_SIZES
    ids = [ax.id for ax in cat]
    assert len(ids) == len(set(ids)) == 33
    assert sum(not ax.derived for ax in cat) == 30


def test_every_axiom_passes(results):
    bad = [(r.id, r.status, r.message) for r in results if not r.passed]
    assert bad == []
    assert [r.id for r in results] == [ax.id for ax in catalogue()]


def test_examples_named_in_the_catalogue(results):
    by = {r.id: r for r in results}
    assert by["sub.idl"].passed and by["pi.beta"].passed
    assert by["sub.idl"].lhs_star and by["sub.idl"].rhs_star


def test_universe_group():
    rs = run_appendix(group="univ")
    assert len(rs) == 8 and all(r.passed for r in rs)


def test_unknown_group():
    with pytest.raises(ValueError):
        catalogue("nope")


@pytest.mark.parametrize("ident", mutable_ids())
def test_mutant_fails_exactly_itself(ident):
    rs = run_appendix(mutate=ident)
    assert [r.id for r in rs if not r.passed] == [ident]
    failed = next(r for r in rs if r.id == ident)
    assert failed.status == "fail"


def test_enough_mutants():
    assert len(mutable_ids()) >= 5
    forced = {ax.id for ax in catalogue()} - set(mutable_ids())
    assert forced == {"sub.eps", "unit.eta", "unit.tt-sub"}
    with pytest.raises(ValueError):
        by_id("sub.eps").mutated()
    with pytest.raises(KeyError):
        run_appendix(mutate="no.such")


def test_low_fuel_reports_exhaustion():
    r = verify_axiom(by_id("pi.beta"), fuel=5)
    assert r.status == "resource-exhausted"
    assert not r.passed


def test_deterministic_steps():
    a = [(r.id, r.status, r.steps, r.method) for r in run_appendix(group="sigma")]
    b = [(r.id, r.status, r.steps, r.method) for r in run_appendix(group="sigma")]
    assert a == b
