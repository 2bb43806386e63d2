"""Depth-first miner over support-sorted items.

Items are ordered by ascending support (ties by original id). Each tree node
extends its parent with a later sibling, intersecting transaction bitsets;
a node with null conjunctive support or bond below minbond is dropped with
its whole subtree, which anti-monotonicity of bond makes safe.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .corpus import CorpusError, TransactionDB
from .gmjp import ConfigError, MiningConfig
from .measures import PatternRecord
from .representations import CondensedRepresentation, PatternSet, build_rcpr, canonical


@dataclass(frozen=True)
class SearchNode:
    itemset: tuple[int, ...]  # internal ids in traversal order
    bits: int
    conj: int
    or_bits: int

    @property
    def disj(self) -> int:
        return self.or_bits.bit_count()


def item_order(db: TransactionDB) -> list[int]:
    """Internal ids by ascending support, ties broken by original id."""
    return sorted((i for i in range(db.item_count) if db.presence[i]),
                  key=lambda i: (db.support(i), db.item_names[i]))


def _children(node: SearchNode, later: list[SearchNode], minsupp: int, num: int, den: int,
              frequent_only: bool) -> list[SearchNode]:
    out = []
    for other in later:
        bits = node.bits & other.bits
        conj = bits.bit_count()
        if conj == 0:
            continue
        or_bits = node.or_bits | other.or_bits
        if conj * den < num * or_bits.bit_count():
            continue
        if frequent_only and conj < minsupp:
            continue
        out.append(SearchNode(node.itemset + other.itemset[-1:], bits, conj, or_bits))
    return out


def _expand(node: SearchNode, later: list[SearchNode], minsupp: int, num: int, den: int,
            frequent_only: bool, out: list[PatternRecord]) -> None:
    out.append(PatternRecord(tuple(sorted(node.itemset)), node.conj, node.disj))
    children = _children(node, later, minsupp, num, den, frequent_only)
    for k, child in enumerate(children):
        _expand(child, children[k + 1:], minsupp, num, den, frequent_only, out)


def _roots(db: TransactionDB, minsupp: int, frequent_only: bool) -> list[SearchNode]:
    roots = []
    for i in item_order(db):
        s = db.support(i)
        if frequent_only and s < minsupp:
            continue
        roots.append(SearchNode((i,), db.presence[i], s, db.presence[i]))
    return roots


def mine_subtree(db: TransactionDB, root: int, minsupp: int, minbond: Fraction,
                 frequent_only: bool) -> list[PatternRecord]:
    """All correlated (and frequent, if asked) patterns under the root-th sorted item."""
    roots = _roots(db, minsupp, frequent_only)
    out: list[PatternRecord] = []
    _expand(roots[root], roots[root + 1:], minsupp, minbond.numerator, minbond.denominator,
            frequent_only, out)
    return out


_worker_db: TransactionDB | None = None


def _init_worker(db):
    global _worker_db
    _worker_db = db


def _run_worker(args):
    return mine_subtree(_worker_db, *args)


def _closed_and_minimal(records):
    keyed: dict[tuple[int, int], set[frozenset]] = {}
    for r in records:
        keyed.setdefault(r.key, set()).add(frozenset(r.itemset))
    closed, minimal = set(), set()
    for r in records:
        s = frozenset(r.itemset)
        same = keyed[r.key]
        if not any(len(o) == len(s) + 1 and s < o for o in same):
            closed.add(r)
        if not any(len(o) == len(s) - 1 and o < s for o in same):
            minimal.add(r)
    return frozenset(closed), frozenset(minimal)


def mine_opt(db: TransactionDB, config: MiningConfig, workers: int = 1):
    """Same contract as :func:`bondminer.gmjp.mine`."""
    if db.transaction_count < 1 or db.item_count < 1:
        raise CorpusError("empty database")
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    minsupp = config.absolute_minsupp(db.transaction_count)
    frequent_only = config.scenario in ("FCP", "RFCCP")
    nroots = len(_roots(db, minsupp, frequent_only))
    jobs = [(k, minsupp, config.minbond, frequent_only) for k in range(nroots)]
    if workers <= 1 or nroots < 2:
        parts = [mine_subtree(db, *job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(db,)) as pool:
            parts = list(pool.map(_run_worker, jobs))
    found = [r for part in parts for r in part]
    T = db.transaction_count
    if frequent_only:
        if config.scenario == "FCP":
            return PatternSet("FCP", tuple(canonical(found)), T, minsupp, config.minbond)
        closed, minimal = _closed_and_minimal(found)
        return CondensedRepresentation("RFCCP", frozenset(), closed, T, minsupp, config.minbond,
                                       generators=minimal)
    rare = [r for r in found if r.conj < minsupp]
    if config.scenario == "RCP":
        return PatternSet("RCP", tuple(canonical(rare)), T, minsupp, config.minbond)
    return build_rcpr(rare, T, minsupp, config.minbond)
