"""Level-wise per-item miner with local and global minimal/closed filtering.

Each item ``i`` owns the itemsets whose smallest internal id is ``i``. Its
subproblem grows them level by level from ``i``'s co-occurrence list, keeps
the correlated ones (and only frequent ones for the frequent scenarios), and
marks local minimal and local closed patterns by comparing (conj, disj) keys
with immediate subsets and supersets inside the subproblem. The global filter
then settles the comparisons that cross subproblem boundaries.
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .corpus import CorpusError, TransactionDB
from .measures import Itemset, PatternRecord
from .representations import CondensedRepresentation, PatternSet, canonical

SCENARIOS = ("FCP", "RFCCP", "RCP", "RCPR")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MiningConfig:
    """Thresholds and scenario.

    ``minsupp`` is an absolute count when given as an int, otherwise a
    fraction of |T| converted by ceiling.
    """

    minsupp: int | Fraction
    minbond: Fraction
    scenario: str = "RCPR"

    def __post_init__(self):
        b = Fraction(self.minbond)
        if not 0 < b <= 1:
            raise ConfigError(f"minbond must lie in (0, 1], got {b}")
        object.__setattr__(self, "minbond", b)
        scenario = self.scenario.upper()
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        object.__setattr__(self, "scenario", scenario)
        if isinstance(self.minsupp, bool) or not isinstance(self.minsupp, (int, Fraction)):
            raise ConfigError("minsupp must be an int count or a Fraction of |T|")
        if isinstance(self.minsupp, Fraction) and not 0 < self.minsupp <= 1:
            raise ConfigError(f"relative minsupp must lie in (0, 1], got {self.minsupp}")

    def absolute_minsupp(self, transaction_count: int) -> int:
        if isinstance(self.minsupp, int):
            value = self.minsupp
        else:
            value = math.ceil(self.minsupp * transaction_count)
        if not 1 <= value <= transaction_count:
            raise ConfigError(f"minsupp {value} outside [1, {transaction_count}]")
        return value


class LocalResultStore:
    """Per-level maps from (conj, disj) to itemsets, plus the local accumulators."""

    def __init__(self):
        self.levels: list[dict[tuple[int, int], set[Itemset]]] = []
        self.local_minimal: list[PatternRecord] = []
        self.local_closed: list[PatternRecord] = []

    def add_level(self, records: Iterable[PatternRecord]) -> dict:
        level: dict[tuple[int, int], set[Itemset]] = defaultdict(set)
        for r in records:
            level[r.key].add(r.itemset)
        self.levels.append(level)
        return level


def _owned_subsets(itemset: Itemset):
    """Immediate subsets that keep the first (owning) item."""
    for k in range(1, len(itemset)):
        yield itemset[:k] + itemset[k + 1:]


def _immediate_subsets(itemset: Itemset):
    if len(itemset) < 2:
        return
    for k in range(len(itemset)):
        yield itemset[:k] + itemset[k + 1:]


def find_local_minimal(level_candidates: Iterable[PatternRecord], previous_level: dict,
                       owner: int) -> list[PatternRecord]:
    """Candidates with no immediate subset of the subproblem under the same key."""
    out = []
    for r in level_candidates:
        same = previous_level.get(r.key, ())
        if len(r.itemset) == 1 or not any(s in same for s in _owned_subsets(r.itemset)):
            out.append(r)
    return out


def find_local_closed(previous_records: Iterable[PatternRecord], current_level: dict) -> list[PatternRecord]:
    """Level n-1 patterns with no kept level-n superset under the same key."""
    out = []
    for r in previous_records:
        s = set(r.itemset)
        if not any(s.issubset(o) for o in current_level.get(r.key, ())):
            out.append(r)
    return out


def global_filter(all_local_minimals: Iterable[PatternRecord],
                  all_local_closeds: Iterable[PatternRecord]) -> tuple[frozenset, frozenset]:
    """Drop locals beaten by a direct subset (minimal) or superset (closed) with an equal key."""
    mins = set(all_local_minimals)
    closeds = set(all_local_closeds)
    min_keys = {(r.itemset, r.key) for r in mins}
    closed_keys = {(r.itemset, r.key) for r in closeds}

    mrcp = frozenset(
        r for r in mins
        if not any((sub, r.key) in min_keys for sub in _immediate_subsets(r.itemset))
    )
    by_sub: set[tuple[Itemset, tuple[int, int]]] = set()
    for itemset, key in closed_keys:
        for sub in _immediate_subsets(itemset):
            by_sub.add((sub, key))
    crcp = frozenset(r for r in closeds if (r.itemset, r.key) not in by_sub)
    return mrcp, crcp


@dataclass
class SubproblemResult:
    item: int
    emitted: list[PatternRecord] = field(default_factory=list)
    local_minimal: list[PatternRecord] = field(default_factory=list)
    local_closed: list[PatternRecord] = field(default_factory=list)


def _is_correlated(conj: int, disj: int, num: int, den: int) -> bool:
    return conj * den >= num * disj


def mine_item(db: TransactionDB, item: int, minsupp: int, minbond: Fraction, scenario: str) -> SubproblemResult:
    """Run the subproblem owned by ``item``."""
    num, den = minbond.numerator, minbond.denominator
    frequent_only = scenario in ("FCP", "RFCCP")
    want_rare = scenario in ("RCP", "RCPR")
    presence = db.presence
    res = SubproblemResult(item)
    sup_i = presence[item].bit_count()
    if sup_i == 0:
        return res
    if frequent_only and sup_i < minsupp:
        return res

    store = LocalResultStore()
    # kept: itemset -> (and_bits, or_bits); records of the current level
    root = PatternRecord((item,), sup_i, sup_i)
    kept = {root.itemset: (presence[item], presence[item])}
    kept_records = [root]

    def emitted(recs):
        return [r for r in recs if (r.conj < minsupp) == want_rare]

    level_emit = emitted(kept_records)
    res.emitted.extend(level_emit)
    res.local_minimal.extend(level_emit)
    store.add_level(level_emit)

    supports = [presence[j].bit_count() for j in range(db.item_count)]
    n = 1
    while kept:
        n += 1
        if n == 2:
            raw = [(item, j) for j in db.co_occurrence[item] if j > item]
        else:
            raw = _prefix_join(sorted(kept))
        new_kept: dict[Itemset, tuple[int, int]] = {}
        new_records: list[PatternRecord] = []
        for cand in raw:
            # cross-support: min/max item support below minbond
            sups = [supports[j] for j in cand]
            if min(sups) * den < num * max(sups):
                continue
            # order ideal: every immediate subset owned by this item must be kept
            if n > 2 and not all(sub in kept for sub in _owned_subsets(cand)):
                continue
            parent_and, parent_or = kept[cand[:-1]]
            last = presence[cand[-1]]
            and_bits, or_bits = parent_and & last, parent_or | last
            conj, disj = and_bits.bit_count(), or_bits.bit_count()
            if not _is_correlated(conj, disj, num, den):
                continue
            if frequent_only and conj < minsupp:
                continue
            new_kept[cand] = (and_bits, or_bits)
            new_records.append(PatternRecord(cand, conj, disj))

        level_emit = emitted(new_records)
        prev_level = store.levels[-1]
        res.local_minimal.extend(find_local_minimal(level_emit, prev_level, item))
        current = store.add_level(level_emit)
        prev_emit = emitted(kept_records)
        res.local_closed.extend(find_local_closed(prev_emit, current))
        res.emitted.extend(level_emit)
        kept, kept_records = new_kept, new_records
    return res


def _prefix_join(itemsets: list[Itemset]) -> list[Itemset]:
    out = []
    for a in range(len(itemsets)):
        x = itemsets[a]
        for b in range(a + 1, len(itemsets)):
            y = itemsets[b]
            if x[:-1] != y[:-1]:
                break
            out.append(x + (y[-1],))
    return out


_worker_db: TransactionDB | None = None


def _init_worker(db: TransactionDB) -> None:
    global _worker_db
    _worker_db = db


def _run_worker(args) -> SubproblemResult:
    item, minsupp, minbond, scenario = args
    return mine_item(_worker_db, item, minsupp, minbond, scenario)


def run_subproblems(db: TransactionDB, minsupp: int, minbond: Fraction, scenario: str,
                    workers: int = 1) -> list[SubproblemResult]:
    jobs = [(i, minsupp, minbond, scenario) for i in range(db.item_count)]
    if workers <= 1 or db.item_count < 2:
        return [mine_item(db, *job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(db,)) as pool:
        # map preserves job order, so the merge is canonical whatever the scheduling
        return list(pool.map(_run_worker, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def mine(db: TransactionDB, config: MiningConfig, workers: int = 1):
    """Mine one scenario.

    FCP and RCP give a :class:`PatternSet`; RCPR and RFCCP give a
    :class:`CondensedRepresentation` (RFCCP also carries the frequent minimal
    correlated generators).
    """
    if db.transaction_count < 1 or db.item_count < 1:
        raise CorpusError("empty database")
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    minsupp = config.absolute_minsupp(db.transaction_count)
    results = run_subproblems(db, minsupp, config.minbond, config.scenario, workers)
    T = db.transaction_count
    if config.scenario in ("FCP", "RCP"):
        records = canonical(r for res in results for r in res.emitted)
        return PatternSet(config.scenario, tuple(records), T, minsupp, config.minbond)
    minimal, closed = global_filter(
        (r for res in results for r in res.local_minimal),
        (r for res in results for r in res.local_closed),
    )
    if config.scenario == "RCPR":
        return CondensedRepresentation("RCPR", minimal, closed, T, minsupp, config.minbond)
    return CondensedRepresentation("RFCCP", frozenset(), closed, T, minsupp, config.minbond,
                                   generators=minimal)


def frequent_minimal_generators(db: TransactionDB, minsupp: int | Fraction, minbond: Fraction,
                                workers: int = 1) -> frozenset[PatternRecord]:
    """Frequent minimal correlated patterns (premises for RFCCP-based rules)."""
    rep = mine(db, MiningConfig(minsupp, Fraction(minbond), "RFCCP"), workers)
    return rep.generators
