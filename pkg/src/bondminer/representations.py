"""Condensed representations of correlated patterns.

A representation keeps a minimal-generator part and a closed part. From it
we answer membership and support queries, regenerate the full rare
correlated set, and derive the reduced kinds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .measures import Itemset, PatternRecord

REP_KINDS = ("RCPR", "MMaxCR", "MinMCR", "MinMMaxCR", "RFCCP")
PATTERN_KINDS = ("FCP", "RCP")


class RepresentationError(ValueError):
    """Malformed representation file or wrong representation kind."""


class KindMismatch(RepresentationError):
    pass


def canonical(records: Iterable[PatternRecord]) -> list[PatternRecord]:
    """Sort by itemset length, then lexicographically."""
    return sorted(records, key=lambda r: (len(r.itemset), r.itemset))


@dataclass(frozen=True)
class CondensedRepresentation:
    kind: str
    minimal_part: frozenset[PatternRecord]
    closed_part: frozenset[PatternRecord]
    transaction_count: int
    minsupp: int
    minbond: Fraction
    # frequent minimal correlated generators, only carried by RFCCP
    generators: frozenset[PatternRecord] = field(default=frozenset())

    def __post_init__(self):
        if self.kind not in REP_KINDS:
            raise RepresentationError(f"unknown representation kind {self.kind!r}")

    def elements(self) -> list[PatternRecord]:
        """Distinct elements of both parts, canonically sorted."""
        seen = {r.itemset: r for r in self.minimal_part}
        seen.update((r.itemset, r) for r in self.closed_part)
        return canonical(seen.values())

    def size(self) -> int:
        return len(self.elements())

    def lookup(self, itemset: Sequence[int]) -> PatternRecord | None:
        return self._by_itemset.get(tuple(sorted(itemset)))

    @cached_property
    def _by_itemset(self) -> dict[Itemset, PatternRecord]:
        return {r.itemset: r for r in self.elements()}

    @cached_property
    def _bits(self) -> dict[int, int]:
        ids = sorted({i for r in self.elements() for i in r.itemset} |
                     {i for r in self.generators for i in r.itemset})
        return {item: 1 << k for k, item in enumerate(ids)}

    def _mask(self, itemset: Iterable[int]) -> int | None:
        """Bitmask of the itemset, or None if it names an item absent from the representation."""
        bits = self._bits
        m = 0
        for i in itemset:
            b = bits.get(i)
            if b is None:
                return None
            m |= b
        return m

    def _masked(self, records) -> list[tuple[int, PatternRecord]]:
        return [(self._mask(r.itemset), r) for r in canonical(records)]

    @cached_property
    def _minimal_masks(self):
        return self._masked(self.minimal_part)

    @cached_property
    def _closed_masks(self):
        return self._masked(self.closed_part)

    @cached_property
    def _all_masks(self):
        return self._masked(self.elements())


@dataclass(frozen=True)
class PatternSet:
    """A plain mined pattern set (FCP or RCP scenario output)."""

    kind: str
    records: tuple[PatternRecord, ...]
    transaction_count: int
    minsupp: int
    minbond: Fraction

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise RepresentationError(f"unknown pattern set kind {self.kind!r}")


@dataclass(frozen=True)
class BondInterval:
    conj_lo: int
    conj_hi: int
    disj_lo: int
    disj_hi: int

    def __post_init__(self):
        if not (self.conj_lo <= self.conj_hi and 0 < self.disj_lo <= self.disj_hi):
            raise ValueError(f"inconsistent interval {self}")

    @property
    def bond_lo(self) -> Fraction:
        return Fraction(self.conj_lo, self.disj_hi)

    @property
    def bond_hi(self) -> Fraction:
        return Fraction(self.conj_hi, self.disj_lo)

    def contains(self, rec: PatternRecord) -> bool:
        return (self.conj_lo <= rec.conj <= self.conj_hi
                and self.disj_lo <= rec.disj <= self.disj_hi
                and self.bond_lo <= rec.bond <= self.bond_hi)

    @classmethod
    def exact(cls, rec: PatternRecord) -> "BondInterval":
        return cls(rec.conj, rec.conj, rec.disj, rec.disj)


def _maximal(records: Iterable[PatternRecord]) -> frozenset[PatternRecord]:
    recs = list(records)
    sets = [frozenset(r.itemset) for r in recs]
    return frozenset(r for r, s in zip(recs, sets) if not any(s < o for o in sets))


def _minimal(records: Iterable[PatternRecord]) -> frozenset[PatternRecord]:
    recs = list(records)
    sets = [frozenset(r.itemset) for r in recs]
    return frozenset(r for r, s in zip(recs, sets) if not any(o < s for o in sets))


def build_rcpr(rcp: Iterable[PatternRecord], transaction_count: int, minsupp: int,
               minbond: Fraction) -> CondensedRepresentation:
    """Extract MRCP and CRCP from a complete RCP set.

    An equal-key immediate subset or superset of a rare correlated pattern is
    itself rare and correlated, so checking inside the set is enough.
    """
    by_key: dict[tuple[int, int], set[frozenset]] = {}
    recs = list(rcp)
    for r in recs:
        by_key.setdefault(r.key, set()).add(frozenset(r.itemset))
    minimal, closed = set(), set()
    for r in recs:
        same = by_key[r.key]
        s = frozenset(r.itemset)
        if not any(o < s and len(o) == len(s) - 1 for o in same):
            minimal.add(r)
        if not any(s < o and len(o) == len(s) + 1 for o in same):
            closed.add(r)
    return CondensedRepresentation("RCPR", frozenset(minimal), frozenset(closed),
                                   transaction_count, minsupp, Fraction(minbond))


def derive(kind: str, rcpr: CondensedRepresentation) -> CondensedRepresentation:
    """Reduce an RCPR to MMaxCR, MinMCR or MinMMaxCR."""
    if rcpr.kind != "RCPR":
        raise KindMismatch(f"derive needs an RCPR, got {rcpr.kind}")
    if kind == "RCPR":
        return rcpr
    minimal, closed = rcpr.minimal_part, rcpr.closed_part
    if kind in ("MMaxCR", "MinMMaxCR"):
        closed = _maximal(closed)
    if kind in ("MinMCR", "MinMMaxCR"):
        minimal = _minimal(minimal)
    if kind not in REP_KINDS or kind == "RFCCP":
        raise KindMismatch(f"cannot derive {kind} from RCPR")
    return replace(rcpr, kind=kind, minimal_part=minimal, closed_part=closed)


def _closure(rep: CondensedRepresentation, mask: int) -> PatternRecord | None:
    best = None
    for m, r in rep._closed_masks:
        if m & mask == mask and (best is None or len(r.itemset) < len(best.itemset)):
            best = r
    return best


def _bracketed(rep: CondensedRepresentation, mask: int) -> bool:
    has_sub = has_sup = False
    for m, _ in rep._all_masks:
        if m & mask == m:
            has_sub = True
        if m & mask == mask:
            has_sup = True
        if has_sub and has_sup:
            return True
    return False


def query(rep: CondensedRepresentation, itemset: Sequence[int]) -> PatternRecord | None:
    """Exact answer from an RCPR or MinMCR; None means not rare correlated.

    Values of a non-member come from its closure, the smallest closed element
    covering it.
    """
    if rep.kind not in ("RCPR", "MinMCR"):
        raise KindMismatch(f"closure query needs RCPR or MinMCR, got {rep.kind}")
    items = tuple(sorted(set(itemset)))
    if not items:
        raise ValueError("empty itemset")
    hit = rep.lookup(items)
    if hit is not None:
        return hit
    mask = rep._mask(items)
    if mask is None or not _bracketed(rep, mask):
        return None
    f = _closure(rep, mask)
    if f is None:
        return None
    return PatternRecord(items, f.conj, f.disj)


query_minmcr = query


def query_mmaxcr(rep: CondensedRepresentation, itemset: Sequence[int]) -> PatternRecord | None:
    """Exact answer from an MMaxCR: conj and bond are minima over subsets in the representation."""
    if rep.kind != "MMaxCR":
        raise KindMismatch(f"expected MMaxCR, got {rep.kind}")
    items = tuple(sorted(set(itemset)))
    if not items:
        raise ValueError("empty itemset")
    hit = rep.lookup(items)
    if hit is not None:
        return hit
    mask = rep._mask(items)
    if mask is None or not _bracketed(rep, mask):
        return None
    subs = [r for m, r in rep._all_masks if m & mask == m]
    conj = min(r.conj for r in subs)
    b = min(r.bond for r in subs)
    disj = conj / b
    if disj.denominator != 1:
        raise RepresentationError(f"inconsistent representation at {items}")
    return PatternRecord(items, conj, int(disj))


def query_approx(rep: CondensedRepresentation, itemset: Sequence[int]) -> BondInterval | None:
    """Interval answer from a MinMMaxCR; exact (degenerate) for members."""
    if rep.kind != "MinMMaxCR":
        raise KindMismatch(f"expected MinMMaxCR, got {rep.kind}")
    items = tuple(sorted(set(itemset)))
    if not items:
        raise ValueError("empty itemset")
    hit = rep.lookup(items)
    if hit is not None:
        return BondInterval.exact(hit)
    mask = rep._mask(items)
    if mask is None or not _bracketed(rep, mask):
        return None
    sups = [r for m, r in rep._closed_masks if m & mask == mask]
    subs = [r for m, r in rep._minimal_masks if m & mask == m]
    if not sups or not subs:
        return None
    r1 = max(r.conj for r in sups)
    r2 = min(r.conj for r in subs)
    r3 = min(r.disj for r in sups)
    r4 = max(r.disj for r in subs)
    return BondInterval(min(r1, r2), max(r1, r2), min(r3, r4), max(r3, r4))


def query_rfccp(rep: CondensedRepresentation, itemset: Sequence[int]) -> PatternRecord | None:
    """Exact answer from an RFCCP; None means not frequent correlated."""
    if rep.kind != "RFCCP":
        raise KindMismatch(f"expected RFCCP, got {rep.kind}")
    items = tuple(sorted(set(itemset)))
    if not items:
        raise ValueError("empty itemset")
    mask = rep._mask(items)
    if mask is None:
        return None
    f = _closure(rep, mask)
    return None if f is None else PatternRecord(items, f.conj, f.disj)


def answer(rep: CondensedRepresentation, itemset: Sequence[int]):
    """Dispatch to the query matching the representation kind."""
    return {
        "RCPR": query, "MinMCR": query, "MMaxCR": query_mmaxcr,
        "MinMMaxCR": query_approx, "RFCCP": query_rfccp,
    }[rep.kind](rep, itemset)


def regenerate_rcp(rep: CondensedRepresentation) -> list[PatternRecord]:
    """Rebuild the full RCP set from an RCPR.

    Every pattern between a minimal generator M and its closure F (all X with
    M ⊆ X ⊆ F) carries F's supports.
    """
    if rep.kind != "RCPR":
        raise KindMismatch(f"regeneration needs an RCPR, got {rep.kind}")
    out = {r.itemset: r for r in rep.elements()}
    for m, g in rep._minimal_masks:
        f = _closure(rep, m)
        if f is None:
            raise RepresentationError(f"minimal {g.itemset} has no closure in the representation")
        extra = [i for i in f.itemset if i not in g.itemset]
        for k in range(1, len(extra)):
            for add in combinations(extra, k):
                items = tuple(sorted(g.itemset + add))
                out.setdefault(items, PatternRecord(items, f.conj, f.disj))
    return canonical(out.values())


def compactness(rep: CondensedRepresentation | int, full_set_size: int) -> Fraction:
    """1 - |representation| / |full set|."""
    if full_set_size <= 0:
        raise ValueError("full_set_size must be positive")
    size = rep if isinstance(rep, int) else rep.size()
    if size > full_set_size:
        raise ValueError("representation larger than the full set")
    return 1 - Fraction(size, full_set_size)


# -- files ------------------------------------------------------------------

def _fmt_ids(itemset: Itemset, names: Sequence[Hashable] | None) -> tuple[str, tuple]:
    ids = tuple(sorted(names[i] for i in itemset)) if names is not None else itemset
    return " ".join(str(x) for x in ids), ids


def _header(kind, transactions, minsupp, minbond, extra="") -> str:
    b = Fraction(minbond)
    return f"# kind={kind} transactions={transactions} minsupp={minsupp} minbond={b.numerator}/{b.denominator}{extra}\n"


def _lines(part: str, records, names) -> list[tuple]:
    out = []
    for r in records:
        text, ids = _fmt_ids(r.itemset, names)
        b = r.bond
        out.append(((len(ids), ids), f"{part};{text};{r.conj};{r.disj};{b.numerator}/{b.denominator}\n"))
    return out


def format_result(result: CondensedRepresentation | PatternSet,
                  names: Sequence[Hashable] | None = None) -> str:
    """Serialize with original item ids, each part sorted canonically."""
    if isinstance(result, PatternSet):
        body = _lines("pattern", result.records, names)
        parts = [body]
    else:
        parts = [_lines("minimal", result.minimal_part, names),
                 _lines("closed", result.closed_part, names)]
        if result.generators:
            parts.append(_lines("generator", result.generators, names))
    text = _header(result.kind, result.transaction_count, result.minsupp, result.minbond)
    for body in parts:
        text += "".join(line for _, line in sorted(body))
    return text


def write_result(result, path: str | Path, names: Sequence[Hashable] | None = None) -> None:
    Path(path).write_text(format_result(result, names), encoding="utf-8", newline="\n")


def _parse_ids(text: str, where: str) -> Itemset:
    try:
        ids = [int(t) for t in text.split()]
    except ValueError:
        raise RepresentationError(f"{where}: non-integer item id") from None
    if not ids:
        raise RepresentationError(f"{where}: empty itemset")
    if len(set(ids)) != len(ids):
        raise RepresentationError(f"{where}: duplicate item id")
    return tuple(sorted(ids))


def parse_result(lines: Iterable[str], source: str = "<input>"):
    it = iter(lines)
    head = next(it, "").strip()
    if not head.startswith("#"):
        raise RepresentationError(f"{source}: missing header line")
    meta = {}
    for tok in head[1:].split():
        k, _, v = tok.partition("=")
        meta[k] = v
    try:
        kind = meta["kind"]
        transactions = int(meta["transactions"])
        minsupp = int(meta["minsupp"])
        minbond = Fraction(meta["minbond"])
    except (KeyError, ValueError, ZeroDivisionError):
        raise RepresentationError(f"{source}: bad header {head!r}") from None
    parts: dict[str, set[PatternRecord]] = {"minimal": set(), "closed": set(), "generator": set(), "pattern": set()}
    for lineno, line in enumerate(it, 2):
        line = line.strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        fields = line.split(";")
        if len(fields) != 5 or fields[0] not in parts:
            raise RepresentationError(f"{where}: malformed record {line!r}")
        items = _parse_ids(fields[1], where)
        try:
            conj, disj = int(fields[2]), int(fields[3])
            b = Fraction(fields[4])
            rec = PatternRecord(items, conj, disj)
        except (ValueError, ZeroDivisionError) as exc:
            raise RepresentationError(f"{where}: {exc}") from None
        if b != rec.bond or fields[4] != f"{b.numerator}/{b.denominator}" or disj > transactions:
            raise RepresentationError(f"{where}: inconsistent supports/bond")
        parts[fields[0]].add(rec)
    if kind in PATTERN_KINDS:
        if parts["minimal"] or parts["closed"] or parts["generator"]:
            raise RepresentationError(f"{source}: {kind} file may only hold pattern records")
        return PatternSet(kind, tuple(canonical(parts["pattern"])), transactions, minsupp, minbond)
    if kind not in REP_KINDS:
        raise RepresentationError(f"{source}: unknown kind {kind!r}")
    if parts["pattern"]:
        raise RepresentationError(f"{source}: pattern records in a {kind} file")
    return CondensedRepresentation(kind, frozenset(parts["minimal"]), frozenset(parts["closed"]),
                                   transactions, minsupp, minbond, frozenset(parts["generator"]))


def read_result(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RepresentationError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_result(text.splitlines(), str(path))
