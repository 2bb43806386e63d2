"""Supports, the bond measure and the cross-support pruning test."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from operator import and_, or_
from typing import Iterable, Mapping

from .corpus import TransactionDB

Itemset = tuple[int, ...]


class UndefinedBondError(ValueError):
    """The itemset has null disjunctive support, so its bond is 0/0."""


@dataclass(frozen=True, order=True)
class PatternRecord:
    itemset: Itemset
    conj: int
    disj: int

    def __post_init__(self):
        if not self.itemset:
            raise ValueError("empty itemset")
        if any(a >= b for a, b in zip(self.itemset, self.itemset[1:])):
            raise ValueError(f"itemset not strictly sorted: {self.itemset}")
        if not 0 <= self.conj <= self.disj:
            raise ValueError(f"bad supports conj={self.conj} disj={self.disj}")
        if self.disj == 0:
            raise UndefinedBondError(f"null disjunctive support for {self.itemset}")
        if len(self.itemset) == 1 and self.conj != self.disj:
            raise ValueError("singleton must have conj == disj")

    @property
    def bond(self) -> Fraction:
        return Fraction(self.conj, self.disj)

    @property
    def key(self) -> tuple[int, int]:
        return self.conj, self.disj

    def neg(self, transaction_count: int) -> int:
        return transaction_count - self.disj


def _check(db: TransactionDB, itemset: Iterable[int]) -> Itemset:
    items = tuple(sorted(set(itemset)))
    if not items:
        raise ValueError("empty itemset")
    for i in items:
        if not 0 <= i < db.item_count:
            raise IndexError(f"invalid item id {i}")
    return items


def cover(db: TransactionDB, itemset: Iterable[int]) -> int:
    """Bitset of the transactions containing every item."""
    return reduce(and_, (db.presence[i] for i in itemset))


def supports(db: TransactionDB, itemset: Iterable[int]) -> tuple[int, int, int]:
    """Return (conjunctive, disjunctive, negative) supports."""
    items = _check(db, itemset)
    bits = [db.presence[i] for i in items]
    conj = reduce(and_, bits).bit_count()
    disj = reduce(or_, bits).bit_count()
    return conj, disj, db.transaction_count - disj


def record(db: TransactionDB, itemset: Iterable[int]) -> PatternRecord:
    items = _check(db, itemset)
    conj, disj, _ = supports(db, items)
    return PatternRecord(items, conj, disj)


def bond(db: TransactionDB, itemset: Iterable[int]) -> Fraction:
    conj, disj, _ = supports(db, itemset)
    if disj == 0:
        raise UndefinedBondError(f"null disjunctive support for {tuple(itemset)}")
    return Fraction(conj, disj)


def is_correlated(conj: int, disj: int, minbond: Fraction) -> bool:
    # conj/disj >= num/den, compared without division
    return conj * minbond.denominator >= minbond.numerator * disj


def cross_support_violates(db: TransactionDB, itemset: Iterable[int], minbond: Fraction) -> bool:
    """True when min/max single-item support < minbond, which certifies bond < minbond."""
    items = _check(db, itemset)
    sups = [db.support(i) for i in items]
    lo, hi = min(sups), max(sups)
    return lo * minbond.denominator < minbond.numerator * hi


def _subset_table(itemset: Itemset, table: Mapping) -> list[tuple[int, int]]:
    out = []
    for k in range(1, len(itemset) + 1):
        for sub in combinations(itemset, k):
            try:
                out.append((k, table[sub]))
            except KeyError:
                raise KeyError(f"missing support for subset {sub}") from None
    return out


def disj_from_conj(itemset: Iterable[int], conj_supports: Mapping[Itemset, int]) -> int:
    """Inclusion-exclusion: Supp(or I) from the conjunctive supports of all non-empty subsets.

    ``conj_supports`` is keyed by sorted item tuples.
    """
    items = tuple(sorted(itemset))
    return sum((-1) ** (k - 1) * s for k, s in _subset_table(items, conj_supports))


def conj_from_disj(itemset: Iterable[int], disj_supports: Mapping[Itemset, int]) -> int:
    """Dual of :func:`disj_from_conj`."""
    items = tuple(sorted(itemset))
    return sum((-1) ** (k - 1) * s for k, s in _subset_table(items, disj_supports))
