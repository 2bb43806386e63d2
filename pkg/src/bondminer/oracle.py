"""Brute-force reference over the full itemset lattice.

Everything here is computed literally from the definitions, walking every
non-empty itemset of a small context. It is the ground truth the miners and
representations are checked against; it is not meant to be fast.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .corpus import TransactionDB
from .measures import Itemset, PatternRecord, UndefinedBondError, is_correlated, record

DEFAULT_CAP = 20
FAMILY_NAMES = (
    "CP", "FCP", "RCP", "CCP", "MCP", "CRCP", "MRCP",
    "MaxCP", "MinRP", "MaxCRCP", "MinMRCP", "FCCP", "FMCP",
)


class OracleGuardError(RuntimeError):
    """The context has too many items for full lattice enumeration."""


def oracle_cap() -> int:
    return int(os.environ.get("BONDMINER_ORACLE_CAP", DEFAULT_CAP))


def galois_g(db: TransactionDB, transactions: Iterable[int]) -> Itemset:
    """Items shared by every listed transaction."""
    mask = 0
    for t in transactions:
        mask |= 1 << t
    return tuple(i for i, bits in enumerate(db.presence) if bits & mask == mask)


def galois_h(db: TransactionDB, itemset: Iterable[int]) -> frozenset[int]:
    """Transactions containing every listed item."""
    bits = (1 << db.transaction_count) - 1
    for i in itemset:
        bits &= db.presence[i]
    return frozenset(t for t in range(db.transaction_count) if bits >> t & 1)


def f_bond_closure(db: TransactionDB, itemset: Iterable[int]) -> Itemset:
    """I plus every outside item whose addition leaves bond(I) unchanged."""
    base = record(db, itemset)
    if base.disj == 0:
        raise UndefinedBondError(f"null disjunctive support for {base.itemset}")
    target = base.bond
    extra = [i for i in range(db.item_count)
             if i not in base.itemset and record(db, base.itemset + (i,)).bond == target]
    return tuple(sorted(base.itemset + tuple(extra)))


def _items(mask: int) -> Itemset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _mask(itemset: Iterable[int]) -> int:
    m = 0
    for i in itemset:
        m |= 1 << i
    return m


@dataclass
class EquivalenceClass:
    """Itemsets sharing one f_bond closure.

    Members share conj and disj whenever the bond is non-null. Null-bond
    itemsets all close to the full item set and may differ in disj; ``disj``
    is then the closed pattern's own value.
    """

    closed: Itemset
    minimals: frozenset[Itemset]
    conj: int
    disj: int
    members: tuple[Itemset, ...]

    @property
    def bond(self) -> Fraction:
        return Fraction(self.conj, self.disj)


class Lattice:
    """All non-empty itemsets of a context with supports, closures and classes.

    Threshold-independent; :meth:`families` slices it for one (minsupp, minbond).
    """

    def __init__(self, db: TransactionDB, cap: int | None = None):
        cap = oracle_cap() if cap is None else cap
        if db.item_count > cap:
            raise OracleGuardError(f"{db.item_count} items exceeds oracle cap {cap}")
        self.db = db
        n = db.item_count
        size = 1 << n
        full = (1 << db.transaction_count) - 1
        conj_bits = [full] * size
        disj_bits = [0] * size
        for m in range(1, size):
            low = m & -m
            i = low.bit_length() - 1
            conj_bits[m] = conj_bits[m ^ low] & db.presence[i]
            disj_bits[m] = disj_bits[m ^ low] | db.presence[i]
        self.conj = [b.bit_count() for b in conj_bits]
        self.disj = [b.bit_count() for b in disj_bits]
        self.size = size

        # f_bond closure, straight from its definition
        self.closure = [0] * size
        for m in range(1, size):
            c = m
            for i in range(n):
                bit = 1 << i
                if not m & bit and self._same_bond(m, m | bit):
                    c |= bit
            self.closure[m] = c

        groups: dict[int, list[int]] = defaultdict(list)
        for m in range(1, size):
            groups[self.closure[m]].append(m)
        self.minimal = [False] * size
        self.classes: list[EquivalenceClass] = []
        for closed, members in groups.items():
            mins = [m for m in members if not any(o != m and o & m == o for o in members)]
            for m in mins:
                self.minimal[m] = True
            self.classes.append(EquivalenceClass(
                closed=_items(closed),
                minimals=frozenset(_items(m) for m in mins),
                conj=self.conj[closed],
                disj=self.disj[closed],
                members=tuple(_items(m) for m in sorted(members)),
            ))

    def _same_bond(self, a: int, b: int) -> bool:
        return self.conj[a] * self.disj[b] == self.conj[b] * self.disj[a]

    def record(self, itemset: Iterable[int]) -> PatternRecord:
        m = _mask(itemset)
        return PatternRecord(_items(m), self.conj[m], self.disj[m])

    def closure_of(self, itemset: Iterable[int]) -> Itemset:
        return _items(self.closure[_mask(itemset)])

    def itemsets(self):
        for m in range(1, self.size):
            yield _items(m)

    def families(self, minsupp: int, minbond: Fraction) -> dict[str, frozenset[PatternRecord]]:
        n = self.db.item_count
        size = self.size
        corr = [False] * size
        rare = [False] * size
        for m in range(1, size):
            corr[m] = is_correlated(self.conj[m], self.disj[m], minbond)
            rare[m] = self.conj[m] < minsupp
        closed = [m and self.closure[m] == m for m in range(size)]

        fam: dict[str, list[int]] = {k: [] for k in FAMILY_NAMES}
        for m in range(1, size):
            if rare[m] and all(not rare[m ^ (1 << i)] for i in range(n) if m >> i & 1 and m != 1 << i):
                fam["MinRP"].append(m)
            if not corr[m]:
                continue
            fam["CP"].append(m)
            fam["RCP" if rare[m] else "FCP"].append(m)
            if closed[m]:
                fam["CCP"].append(m)
                fam["CRCP" if rare[m] else "FCCP"].append(m)
            if self.minimal[m]:
                fam["MCP"].append(m)
                fam["MRCP" if rare[m] else "FMCP"].append(m)
            if not any(corr[m | 1 << i] for i in range(n) if not m >> i & 1):
                fam["MaxCP"].append(m)
        maxcp = set(fam["MaxCP"])
        minrp = set(fam["MinRP"])
        fam["MaxCRCP"] = [m for m in fam["CRCP"] if m in maxcp]
        fam["MinMRCP"] = [m for m in fam["MRCP"] if m in minrp]
        return {k: frozenset(PatternRecord(_items(m), self.conj[m], self.disj[m]) for m in v)
                for k, v in fam.items()}


def enumerate_families(db: TransactionDB, minsupp: int, minbond: Fraction) -> dict[str, frozenset[PatternRecord]]:
    return Lattice(db).families(minsupp, Fraction(minbond))


def equivalence_classes(db: TransactionDB) -> list[EquivalenceClass]:
    return Lattice(db).classes


def lattice_dot(db: TransactionDB, families: dict[str, frozenset[PatternRecord]]) -> str:
    """Graphviz rendering of the lattice, nodes coloured by family (debug aid)."""
    colour = {}
    for name, fill in (("RCP", "lightsalmon"), ("FCP", "lightblue")):
        for r in families.get(name, ()):
            colour[r.itemset] = fill
    bold = {r.itemset for k in ("CRCP", "MRCP", "FCCP") for r in families.get(k, ())}
    lattice = Lattice(db)
    lines = ["digraph lattice {", "  rankdir=BT;", "  node [shape=box, style=filled, fillcolor=white];"]

    def label(items):
        return "".join(str(x) for x in db.decode(items)) if items else "{}"

    for items in lattice.itemsets():
        r = lattice.record(items)
        attrs = [f'label="{label(items)}\\n{r.conj} {r.bond}"']
        if items in colour:
            attrs.append(f"fillcolor={colour[items]}")
        if items in bold:
            attrs.append("penwidth=2")
        lines.append(f'  "{label(items)}" [{", ".join(attrs)}];')
        for i in items:
            sub = tuple(x for x in items if x != i)
            if sub:
                lines.append(f'  "{label(sub)}" -> "{label(items)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
