"""Acceptance suite: one test per criterion, summarised per criterion at the end of the run."""

import os
import random
import time
from fractions import Fraction

import pytest

from _support import check_against_oracle, enc, named, random_db, random_thresholds, toy_db
from bondminer.cli import main
from bondminer.corpus import load_fimi
from bondminer.gmjp import MiningConfig, mine
from bondminer.opt import mine_opt
from bondminer.oracle import Lattice
from bondminer.representations import (
    compactness,
    derive,
    query,
    query_approx,
    query_mmaxcr,
    regenerate_rcp,
)
from bondminer.rules import (
    classification_rules,
    evaluate,
    filter_igb,
    generate_generic_rules,
    verify_rule,
)

B = Fraction(1, 5)
RCP_LISTING = {
    ("A", 3, 3), ("D", 1, 1), ("AB", 2, 5), ("AC", 3, 4), ("AD", 1, 3), ("AE", 2, 5), ("BC", 3, 5),
    ("CD", 1, 4), ("CE", 3, 5), ("ABC", 2, 5), ("ABE", 2, 5), ("ACD", 1, 4), ("ACE", 2, 5),
    ("BCE", 3, 5), ("ABCE", 2, 5),
}


def _letters(db, recs):
    return {s for s, _, _ in named(db, recs)}


def test_criterion_1_running_example_exactness():
    t0 = time.perf_counter()
    db = toy_db()
    for miner in (mine, mine_opt):
        fcp = miner(db, MiningConfig(4, B, "FCP"))
        assert named(db, fcp.records) == {("B", 4, 4), ("C", 4, 4), ("E", 4, 4), ("BE", 4, 4)}
        rcp = miner(db, MiningConfig(4, B, "RCP"))
        assert named(db, rcp.records) == RCP_LISTING
        rep = miner(db, MiningConfig(4, B, "RCPR"))
        assert _letters(db, rep.minimal_part) == {"A", "D", "AB", "AC", "AD", "AE", "BC", "CD", "CE"}
        assert _letters(db, rep.closed_part) == {"A", "D", "AC", "AD", "ACD", "BCE", "ABCE"}
        assert rep.size() == 12
        assert named(db, rep.elements()) <= RCP_LISTING
        mm = derive("MinMMaxCR", rep)
        assert _letters(db, mm.closed_part) == {"ACD", "ABCE"}
        assert _letters(db, mm.minimal_part) == {"A", "D", "BC", "CE"}
        assert mm.size() == 6
        rf = miner(db, MiningConfig(4, B, "RFCCP"))
        assert named(db, rf.closed_part) == {("C", 4, 4), ("BE", 4, 4)}
    elapsed = time.perf_counter() - t0
    print(f"criterion 1 runtime {elapsed:.4f}s")
    assert elapsed < 1


def test_criterion_2_query_and_regeneration():
    t0 = time.perf_counter()
    db = toy_db()
    rep = mine(db, MiningConfig(4, B, "RCPR"))
    ace = query(rep, enc(db, "ACE"))
    assert (ace.conj, ace.disj, ace.neg(db.transaction_count), ace.bond) == (2, 5, 0, Fraction(2, 5))
    assert query(rep, enc(db, "BE")) is None
    abe = query_mmaxcr(derive("MMaxCR", rep), enc(db, "ABE"))
    assert (abe.conj, abe.bond) == (2, Fraction(2, 5))
    iv = query_approx(derive("MinMMaxCR", rep), enc(db, "ABE"))
    assert (iv.conj_lo, iv.conj_hi) == (2, 3)
    # sound bounds: R4 = disj(A) = 3, so disj in [3, 5] and bond in [2/5, 1]; truth (2, 5) is inside
    assert (iv.disj_lo, iv.disj_hi) == (3, 5)
    assert iv.contains(abe)
    assert named(db, regenerate_rcp(rep)) == RCP_LISTING
    elapsed = time.perf_counter() - t0
    print(f"criterion 2 runtime {elapsed:.4f}s")
    assert elapsed < 1


@pytest.mark.xfail(strict=True, reason="published interval uses disj(A) = 5; the context gives disj(A) = 3")
def test_criterion_2_published_abe_interval():
    db = toy_db()
    rep = derive("MinMMaxCR", mine(db, MiningConfig(4, B, "RCPR")))
    iv = query_approx(rep, enc(db, "ABE"))
    assert (iv.disj_lo, iv.disj_hi) == (5, 5)
    assert (iv.bond_lo, iv.bond_hi) == (Fraction(2, 5), Fraction(3, 5))


def test_criterion_3_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    mismatches, checks = [], 0
    for k in range(200):
        db = random_db(rng)
        lattice = Lattice(db)
        for _ in range(5):
            ms, mb = random_thresholds(rng, db)
            bad = check_against_oracle(db, lattice, ms, mb)
            checks += 1
            if bad:
                mismatches.append((k, ms, mb, bad[:3]))
    elapsed = time.perf_counter() - t0
    print(f"criterion 3: {checks} context/threshold pairs, {len(mismatches)} mismatching, {elapsed:.1f}s")
    assert mismatches == []
    assert elapsed < 300


def test_criterion_4_closure_laws():
    rng = random.Random(77)
    violations = 0
    for _ in range(200):
        lat = Lattice(random_db(rng))
        sets = list(lat.itemsets())
        for items in sets:
            c = lat.closure_of(items)
            violations += not set(items) <= set(c)
            violations += lat.closure_of(c) != c
        for _ in range(40):
            j = rng.choice(sets)
            i = tuple(x for x in j if rng.random() < 0.6) or j[:1]
            violations += not set(lat.closure_of(i)) <= set(lat.closure_of(j))
            ri, rj = lat.record(i), lat.record(j)
            if ri.bond == rj.bond and rj.conj:
                violations += ri.key != rj.key
    print(f"criterion 4 violations: {violations}")
    assert violations == 0


def test_criterion_5_size_chain_and_compactness():
    rng = random.Random(5)
    for _ in range(200):
        db = random_db(rng)
        ms, mb = random_thresholds(rng, db)
        rep = mine(db, MiningConfig(ms, mb, "RCPR"))
        full = len(mine(db, MiningConfig(ms, mb, "RCP")).records)
        size = {k: derive(k, rep).size() for k in ("MMaxCR", "MinMCR", "MinMMaxCR")}
        assert size["MinMMaxCR"] <= size["MMaxCR"]
        assert size["MinMCR"] <= rep.size() <= full
    db = toy_db()
    rep = mine(db, MiningConfig(4, B, "RCPR"))
    full = len(mine(db, MiningConfig(4, B, "RCP")).records)
    assert compactness(rep, full) == Fraction(1, 5)


def test_criterion_6_determinism(tmp_path, capsys):
    rng = random.Random(6)
    data = tmp_path / "det.fimi"
    data.write_text("".join(
        " ".join(str(i) for i in range(40) if rng.random() < 0.3) + f" {100 + rng.randrange(3)}\n"
        for _ in range(300)))
    for miner in ("gmjp", "opt"):
        for scenario, minsupp in (("rcpr", "20%"), ("rcp", "20%"), ("rfccp", "8%")):
            outputs = set()
            for workers in (1, 2, 8):
                for run in range(3):
                    out = tmp_path / f"{miner}-{scenario}-{workers}-{run}"
                    code = main(["mine", "--input", str(data), "--minsupp", minsupp, "--minbond", "0.15",
                                 "--scenario", scenario, "--miner", miner, "--workers", str(workers),
                                 "--out", str(out)])
                    assert code == 0
                    outputs.add(out.read_bytes())
            assert len(outputs) == 1, (miner, scenario)
    capsys.readouterr()


MUSHROOM = os.environ.get("BONDMINER_MUSHROOM")


@pytest.mark.stretch
@pytest.mark.skipif(not MUSHROOM, reason="set BONDMINER_MUSHROOM to the Mushroom FIMI file")
def test_criterion_7_mushroom_counts():
    db = load_fimi(MUSHROOM)
    workers = os.cpu_count() or 1
    rep = mine(db, MiningConfig(Fraction(35, 100), Fraction(15, 100), "RCPR"), workers)
    rcp = mine(db, MiningConfig(Fraction(35, 100), Fraction(15, 100), "RCP"), workers)
    got35 = (rep.size(), len(rep.minimal_part), len(rep.closed_part), len(rcp.records))
    print(f"criterion 7 @35%: RCPR={got35[0]} MRCP={got35[1]} CRCP={got35[2]} RCP={got35[3]}")
    cfg30 = dict(minsupp=Fraction(30, 100), minbond=Fraction(15, 100))
    fcp = mine(db, MiningConfig(scenario="FCP", **cfg30), workers)
    rf = mine(db, MiningConfig(scenario="RFCCP", **cfg30), workers)
    rcp30 = mine(db, MiningConfig(scenario="RCP", **cfg30), workers)
    rep30 = mine(db, MiningConfig(scenario="RCPR", **cfg30), workers)
    got30 = (len(fcp.records), len(rf.closed_part), len(rcp30.records), rep30.size())
    print(f"criterion 7 @30%: FCP={got30[0]} FCCP={got30[1]} RCP={got30[2]} RCPR={got30[3]}")
    assert got35 == (1810, 1412, 652, 100_156)
    assert got30 == (2701, 427, 98_566, 1704)


def _separable_rows():
    rng = random.Random(8)
    rows = []
    for k in range(60):
        label = (100, 200, 300)[k % 3]
        rows.append([label // 100, *(f for f in (7, 8, 9) if rng.random() < 0.5), label])
    return rows


def test_criterion_8_rules():
    db = toy_db()
    rep = mine(db, MiningConfig(4, B, "RCPR"))
    for minconf in (Fraction(1, 3), Fraction(1, 2), Fraction(1)):
        for approx in (False, True):
            rules = generate_generic_rules(rep, minconf, include_approximate=approx)
            assert rules
            assert all(verify_rule(db, r) for r in rules)
            kept = filter_igb(rules, rep.minimal_part, minconf)
            assert filter_igb(kept, rep.minimal_part, minconf) == kept
            assert {r.itemset for r in kept} == {r.itemset for r in rules}

    from bondminer.corpus import TransactionDB
    from bondminer.representations import format_result, parse_result
    rows = _separable_rows()
    train = TransactionDB.from_transactions(rows)
    rf = mine(train, MiningConfig(1, Fraction(1, 10), "RFCCP"))
    rf = parse_result(format_result(rf, train.item_names).splitlines())
    crules = classification_rules(generate_generic_rules(rf, Fraction(1)), {100, 200, 300})
    report = evaluate(crules, [([i for i in r if i < 100], r[-1]) for r in rows])
    print(f"criterion 8 accuracy {report.accuracy}")
    assert report.accuracy == 1
