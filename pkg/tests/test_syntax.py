import pytest
from hypothesis import given, settings

from paramkit.syntax import (
    NAME, SIGNATURES, STAR_TAGS,
    ArityMismatch, Empty, Ext, GenCtx, GenTy, Id, P1, P2, Pi, SexpSyntaxError, Sort, SortMismatch,
    StarTy, Sigma, Term, TermError, Top, Univ, UnknownTag, nodes, parse, parse_dag, print_dag,
    print_term, read, render, validate, wks, extend,
)

from strategies import any_tree, trees

E = Empty()
TOP = Top(E)


def test_parse_single_constructor():
    assert parse("(top (empty))") is Top(E)


def test_parse_expands_vr():
    assert parse("(vr (empty) (top (empty)))") is P2(Id(Ext(E, TOP)))


def test_parse_expands_wkN():
    g = GenCtx("G")
    a, b = GenTy("A", g), GenTy("B", Ext(g, GenTy("A", g)))
    t = parse("(wkN (genctx G) (genty A (genctx G)) (genty B (ext (genctx G) (genty A (genctx G)))))")
    assert t is wks(extend(g, [a, b]), 2)


def test_arity_mismatch():
    with pytest.raises(ArityMismatch) as e:
        parse("(fst)")
    assert e.value.expected == 1 and e.value.got == 0


def test_unknown_tag_position():
    with pytest.raises(UnknownTag) as e:
        parse("(top\n  (nope))")
    assert (e.value.line, e.value.col) == (2, 4)


def test_syntax_error_position():
    with pytest.raises(SexpSyntaxError) as e:
        parse("(top (empty)")
    assert e.value.expected == "')'"
    with pytest.raises(SexpSyntaxError):
        parse("(top (empty)) trailing")
    with pytest.raises(SexpSyntaxError):
        parse("(genctx 9bad)")


def test_sort_mismatch_in_slot():
    with pytest.raises(SortMismatch):
        parse("(top (top (empty)))")
    with pytest.raises(SortMismatch):
        Term("ext", E, E)


def test_comments_and_whitespace():
    assert parse("; leading\n( top\t( empty ) ) ; trailing") is TOP


def test_print_examples():
    assert print_term(TOP) == "(top (empty))"
    assert print_term(P1(Id(Ext(E, TOP)))) == "(wk (empty) (top (empty)))"
    g = GenCtx("G")
    w2 = wks(extend(g, [Top(g), Univ(Ext(g, Top(g)))]), 2)
    assert print_term(w2) == "(wkN (genctx G) (top (genctx G)) (univ (ext (genctx G) (top (genctx G)))))"


def test_sorts_are_four():
    assert len(Sort) == 4
    assert Sigma(TOP, Top(Ext(E, TOP))).sort is Sort.TY


def test_validate_rejects_star_on_composite():
    validate(StarTy(GenTy("A", E)))
    with pytest.raises(TermError):
        validate(StarTy(Pi(TOP, Top(Ext(E, TOP)))))


@settings(max_examples=400, deadline=None)
@given(any_tree)
def test_round_trip(t):
    text = print_term(t)
    assert parse(text) is t
    assert print_term(parse(text)) == text  # deterministic


@settings(max_examples=200, deadline=None)
@given(any_tree)
def test_dag_round_trip(t):
    assert parse_dag(print_dag(t)) is t
    assert read(print_dag(t)) is t
    assert read(print_term(t)) is t
    assert len(print_dag(t).splitlines()) == len(nodes(t)) + 1


@settings(max_examples=100, deadline=None)
@given(trees(Sort.SUB, 6))
def test_slot_sorts_consistent(t):
    if all(u.tag not in STAR_TAGS for u in nodes(t)):
        validate(t)
    for u in nodes(t):
        sort, slots = SIGNATURES[u.tag]
        assert u.sort is sort
        for slot, a in zip(slots, u.args):
            assert (a.sort is slot) if isinstance(a, Term) else slot == NAME
            if isinstance(a, Term):
                assert a.depth < u.depth


def test_render_switches_format():
    g = GenCtx("G")
    t = Top(g)
    for _ in range(30):  # sharing doubles the tree size each step
        t = Sigma(t, t)
    assert t.size > 10 ** 6
    text = render(t)
    assert text.startswith("#0 = ")
    assert read(text) is t
    assert render(TOP) == "(top (empty))"


def test_dag_errors():
    with pytest.raises(SexpSyntaxError):
        parse_dag("#0 = (empty)\n")  # no root
    with pytest.raises(SexpSyntaxError):
        parse_dag("#0 = (top #1)\nroot #0")
    with pytest.raises(ArityMismatch):
        parse_dag("#0 = (empty)\n#1 = (ext #0)\nroot #1")
