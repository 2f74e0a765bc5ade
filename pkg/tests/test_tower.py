import time

import pytest

from paramkit import Kernel, flatten_telescope, normalize, tower
from paramkit.syntax import Empty, Ext, GenCtx, Sigma, StarCtx, SubT, Top, telescope, wk
from paramkit.tower import _flatten
from paramkit.typecheck import TyIn, deep

X = GenCtx("X")


# -- oracles ----------------------------------------------------------------------
#
# Telescope entries are tracked symbolically.  An entry is either an atom (a
# formal Star of a generator, which star sends to another atom) or the packed
# star of a context ``("ctx", entries)``.  Star distributes over Σ and sends
# atoms to atoms, so the Σ-leaf count of an entry is the same after any number
# of further stars:
#     leaves(atom) = 1
#     leaves(ctx es) = 1 + Σ_{e ∈ es} leaves(e)
# where the leading 1 is the opaque X block's own star.

def _leaves(e) -> int:
    if e == "atom":
        return 1
    return 1 + sum(_leaves(x) for x in e[1])


def oracle_levels(n: int):
    entries: list = []
    out = []
    for dim in range(1, n + 1):
        if dim > 1:
            entries = entries + [("ctx", tuple(entries)), "atom"]
        out.append((len(entries), sum(_leaves(e) for e in entries)))
    return out


def test_oracle_recurrence():
    tel = [t for t, _ in oracle_levels(6)]
    assert tel == [0, 2, 4, 6, 8, 10]
    assert all(b - a == 2 for a, b in zip(tel, tel[1:]))


@pytest.fixture(scope="module")
def rep5():
    return tower(5, flatten=True)


def test_level_one():
    lv = tower(1).levels[0]
    assert lv.ambient is X and lv.body is StarCtx(X)
    assert lv.telescope_len == 0


def test_level_two_matches_displayed_context():
    lv = tower(2).levels[1]
    gg = Ext(X, StarCtx(X))
    assert lv.ambient is Ext(gg, SubT(StarCtx(X), wk(gg)))
    assert lv.telescope_len == 2


def test_telescope_lengths(rep5):
    assert [lv.telescope_len for lv in rep5.levels] == [t for t, _ in oracle_levels(5)]


def test_flattened_lengths_match_oracle(rep5):
    assert [lv.flattened_len for lv in rep5.levels] == [f for _, f in oracle_levels(5)]


@deep
def _check_levels(rep):
    k = Kernel()
    for lv in rep.levels:
        j = k.typecheck(lv.body)
        assert isinstance(j, TyIn) and k.ctx_eq(j.ctx, lv.ambient)
        assert len(telescope(lv.ambient)[1]) == lv.telescope_len


def test_every_level_typechecks(rep5):
    _check_levels(rep5)


@deep
def _stable(lv):
    k = Kernel()
    amb = normalize(lv.ambient, kernel=k).term
    body = normalize(lv.body, kernel=k).term
    j = k.typecheck(body)
    return k.judgment_eq(j, TyIn(amb)) and k.judgment_eq(k.typecheck(lv.body), TyIn(amb))


def test_levels_stable_under_normalization():
    for lv in tower(4).levels:
        assert _stable(lv)


@deep
def _flat_ok(lv):
    k = Kernel()
    entries, flat, body = _flatten(lv.body, lv.ambient, k)
    k.typecheck(flat)
    return k.judgment_eq(k.typecheck(body), TyIn(flat)) and entries == telescope(flat)[1]


def test_flattening_preserves_typing():
    for lv in tower(4).levels:
        assert _flat_ok(lv)


def test_flatten_examples():
    e = Empty()
    c = Ext(e, Sigma(Top(e), Top(Ext(e, Top(e)))))
    got = flatten_telescope(Top(c), c)
    assert len(got) == 2 and got[0] is Top(e)
    c1 = Ext(e, Top(e))
    assert flatten_telescope(Top(c1), c1) == [Top(e)]


def test_dim_four_runtime():
    t0 = time.perf_counter()
    rep = tower(4)
    assert time.perf_counter() - t0 < 60
    assert len(rep.levels) == 4


def test_bad_dimension():
    with pytest.raises(ValueError):
        tower(0)
