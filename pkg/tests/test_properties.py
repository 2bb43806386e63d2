"""Lattice laws checked on random contexts against the brute-force oracle."""

import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from _support import check_against_oracle, random_db, random_thresholds
from bondminer.oracle import Lattice

seeds = st.integers(0, 2**32 - 1)


def _subsets_pairs(rng, lattice, k=60):
    sets = list(lattice.itemsets())
    for _ in range(k):
        j = rng.choice(sets)
        i = tuple(x for x in j if rng.random() < 0.6) or j[:1]
        yield i, j


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_closure_laws(seed):
    rng = random.Random(seed)
    lat = Lattice(random_db(rng, max_items=8))
    for items in lat.itemsets():
        c = lat.closure_of(items)
        assert set(items) <= set(c)
        assert lat.closure_of(c) == c
    for i, j in _subsets_pairs(rng, lat):
        assert set(lat.closure_of(i)) <= set(lat.closure_of(j))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_order_ideal_and_filter(seed):
    rng = random.Random(seed)
    db = random_db(rng, max_items=8)
    lat = Lattice(db)
    ms, mb = random_thresholds(rng, db)
    fam = lat.families(ms, mb)
    cp = {r.itemset for r in fam["CP"]}
    for i, j in _subsets_pairs(rng, lat):
        if j in cp:
            assert i in cp
        if lat.record(i).conj < ms:
            assert lat.record(j).conj < ms


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_rcp_size_monotonicity(seed):
    rng = random.Random(seed)
    db = random_db(rng)
    lat = Lattice(db)
    ms, mb = random_thresholds(rng, db)
    rcp = lat.families(ms, mb)["RCP"]
    if ms < db.transaction_count:
        assert rcp <= lat.families(ms + 1, mb)["RCP"]
    if mb < 1:
        assert lat.families(ms, min(Fraction(1), mb + Fraction(1, 7)))["RCP"] <= rcp


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_rcp_bracketed_by_borders(seed):
    rng = random.Random(seed)
    db = random_db(rng)
    lat = Lattice(db)
    ms, mb = random_thresholds(rng, db)
    fam = lat.families(ms, mb)
    cp = {r.itemset for r in fam["CP"]}
    low = [set(r.itemset) for r in fam["MinRP"] if r.itemset in cp]
    high = [set(r.itemset) for r in fam["MaxCP"] if r.conj < ms]
    for r in fam["RCP"]:
        s = set(r.itemset)
        assert any(x <= s for x in low)
        assert any(s <= x for x in high)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_miners_and_queries_match_oracle(seed):
    rng = random.Random(seed)
    db = random_db(rng)
    ms, mb = random_thresholds(rng, db)
    assert check_against_oracle(db, Lattice(db), ms, mb) == []
