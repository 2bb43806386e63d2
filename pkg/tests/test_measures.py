import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from _support import enc, random_db
from bondminer.corpus import TransactionDB
from bondminer.measures import (
    PatternRecord,
    UndefinedBondError,
    bond,
    conj_from_disj,
    cross_support_violates,
    disj_from_conj,
    is_correlated,
    record,
    supports,
)


def test_supports_running_example(toy):
    assert supports(toy, enc(toy, "AD")) == (1, 3, 2)
    assert supports(toy, enc(toy, "BCE")) == (3, 5, 0)


def test_singleton_supports(toy):
    for i in range(toy.item_count):
        s = toy.support(i)
        assert supports(toy, (i,)) == (s, s, 5 - s)
        assert bond(toy, (i,)) == 1


def test_bond_values(toy):
    assert bond(toy, enc(toy, "AB")) == Fraction(2, 5)
    assert bond(toy, enc(toy, "ABCE")) == Fraction(2, 5)


def test_empty_and_invalid(toy):
    with pytest.raises(ValueError):
        supports(toy, ())
    with pytest.raises(IndexError):
        supports(toy, (9,))


def test_undefined_bond_for_unseen_items():
    db = TransactionDB(2, 1, (1, 0), ((), ()), ("x", "y"))
    with pytest.raises(UndefinedBondError):
        bond(db, (1,))


def test_record_invariants():
    with pytest.raises(ValueError):
        PatternRecord((2, 1), 1, 2)
    with pytest.raises(ValueError):
        PatternRecord((1,), 1, 2)
    with pytest.raises(ValueError):
        PatternRecord((1, 2), 3, 2)
    r = PatternRecord((1, 2), 2, 6)
    assert r.bond == Fraction(1, 3) and r.key == (2, 6) and r.neg(10) == 4


def test_threshold_tie_is_correlated():
    assert is_correlated(1, 5, Fraction(1, 5))
    assert not is_correlated(1, 5, Fraction(21, 100))


def test_cross_support(toy):
    assert cross_support_violates(toy, enc(toy, "AD"), Fraction(2, 5))
    assert not cross_support_violates(toy, enc(toy, "BCE"), Fraction(1))


def test_cross_support_certifies_low_bond():
    rng = random.Random(3)
    db = random_db(rng, max_items=8, max_trans=25)
    while db.item_count < 8:
        db = random_db(rng, max_items=8, max_trans=25)
    for den in (2, 3, 5, 10):
        for num in range(1, den + 1):
            mb = Fraction(num, den)
            for k in (2, 3, 4):
                for items in combinations(range(db.item_count), k):
                    if cross_support_violates(db, items, mb):
                        assert bond(db, items) < mb


def test_inclusion_exclusion_toy(toy):
    a, d = enc(toy, "A")[0], enc(toy, "D")[0]
    table = {(a,): 3, (d,): 1, tuple(sorted((a, d))): 1}
    assert disj_from_conj((a, d), table) == 3
    assert disj_from_conj((a,), {(a,): 3}) == 3
    with pytest.raises(KeyError):
        disj_from_conj((a, d), {(a,): 3})


def test_inclusion_exclusion_random():
    rng = random.Random(11)
    db = random_db(rng, max_items=6, max_trans=25)
    while db.item_count < 4:
        db = random_db(rng, max_items=6, max_trans=25)
    conj, disj = {}, {}
    for k in range(1, db.item_count + 1):
        for sub in combinations(range(db.item_count), k):
            c, d, _ = supports(db, sub)
            conj[sub], disj[sub] = c, d
    for items in combinations(range(db.item_count), 3):
        assert disj_from_conj(items, conj) == disj[items]
        assert conj_from_disj(items, disj) == conj[items]


seeds = st.integers(0, 10_000)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_anti_monotone_symmetric_de_morgan(seed):
    rng = random.Random(seed)
    db = random_db(rng, max_items=7)
    items = list(range(db.item_count))
    for _ in range(20):
        j = rng.sample(items, rng.randint(1, min(5, len(items))))
        i = rng.sample(j, rng.randint(1, len(j)))
        ri, rj = record(db, i), record(db, j)
        assert ri.conj >= rj.conj and ri.disj <= rj.disj and ri.bond >= rj.bond
        assert supports(db, j)[2] == db.transaction_count - rj.disj
        assert bond(db, list(reversed(j))) == rj.bond
        # equal bond forces equal supports only when the bond is not null
        if ri.bond == rj.bond and rj.conj:
            assert ri.key == rj.key
