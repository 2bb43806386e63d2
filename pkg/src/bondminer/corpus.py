"""Transaction databases: FIMI parsing, bitset codification, z-score discretization."""

from __future__ import annotations

import csv
import logging
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Sequence

log = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Raised on unusable transaction input."""


@dataclass(frozen=True)
class TransactionDB:
    """Codified extraction context.

    ``presence[i]`` is a Python int used as a bit vector: bit ``t`` is set iff
    item ``i`` occurs in transaction ``t``. Items are dense 0-based internal ids;
    ``item_names[i]`` keeps the id or label the item had in the input.
    """

    item_count: int
    transaction_count: int
    presence: tuple[int, ...]
    co_occurrence: tuple[tuple[int, ...], ...]
    item_names: tuple[Hashable, ...]
    dropped_empty: int = 0
    _name_index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_name_index", {n: i for i, n in enumerate(self.item_names)})

    @classmethod
    def from_transactions(cls, transactions: Iterable[Iterable[Hashable]]) -> "TransactionDB":
        """Build a database from an iterable of item collections.

        Item ids are assigned in first-appearance order. Duplicates inside a
        transaction are collapsed and empty transactions are dropped.
        """
        index: dict[Hashable, int] = {}
        names: list[Hashable] = []
        rows: list[list[int]] = []
        dropped = 0
        for raw in transactions:
            row: list[int] = []
            seen = set()
            for name in raw:
                if name in seen:
                    continue
                seen.add(name)
                if name not in index:
                    index[name] = len(names)
                    names.append(name)
                row.append(index[name])
            if row:
                rows.append(row)
            else:
                dropped += 1
        if not rows:
            raise CorpusError("no usable transactions")

        # first scan: per-item bitsets
        presence = [0] * len(names)
        for t, row in enumerate(rows):
            bit = 1 << t
            for i in row:
                presence[i] |= bit
        # second scan: per-item co-occurrence lists
        cooc: list[set[int]] = [set() for _ in names]
        for row in rows:
            for i in row:
                cooc[i].update(row)
        for i, s in enumerate(cooc):
            s.discard(i)
        return cls(
            item_count=len(names),
            transaction_count=len(rows),
            presence=tuple(presence),
            co_occurrence=tuple(tuple(sorted(s)) for s in cooc),
            item_names=tuple(names),
            dropped_empty=dropped,
        )

    def support(self, item: int) -> int:
        return self.presence[item].bit_count()

    def encode(self, names: Iterable[Hashable]) -> tuple[int, ...]:
        """Map external names to a sorted internal itemset."""
        try:
            return tuple(sorted({self._name_index[n] for n in names}))
        except KeyError as exc:
            raise KeyError(f"unknown item {exc.args[0]!r}") from None

    def decode(self, itemset: Iterable[int]) -> tuple:
        """Map an internal itemset to its sorted external names."""
        return tuple(sorted(self.item_names[i] for i in itemset))

    def transactions(self) -> list[tuple[int, ...]]:
        """Rebuild the transaction rows (internal ids) from the bitsets."""
        rows: list[list[int]] = [[] for _ in range(self.transaction_count)]
        for i, bits in enumerate(self.presence):
            while bits:
                low = bits & -bits
                rows[low.bit_length() - 1].append(i)
                bits ^= low
        return [tuple(r) for r in rows]

    def to_fimi_lines(self) -> list[str]:
        return [" ".join(str(n) for n in self.decode(row)) for row in self.transactions()]


def parse_fimi(lines: Iterable[str], source: str = "<input>") -> TransactionDB:
    rows = []
    for lineno, line in enumerate(lines, 1):
        tokens = line.split()
        if not tokens:
            continue
        row = []
        for tok in tokens:
            try:
                value = int(tok)
            except ValueError:
                raise CorpusError(f"{source}:{lineno}: non-integer token {tok!r}") from None
            if value < 0:
                raise CorpusError(f"{source}:{lineno}: negative item id {value}")
            row.append(value)
        rows.append(row)
    if not rows:
        raise CorpusError(f"{source}: zero usable transactions")
    return TransactionDB.from_transactions(rows)


def load_fimi(path: str | Path) -> TransactionDB:
    """Read a FIMI file: one transaction per line, whitespace-separated item ids."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_fimi(text.splitlines(), source=str(path))


def write_fimi(db: TransactionDB, path: str | Path) -> None:
    Path(path).write_text("".join(line + "\n" for line in db.to_fimi_lines()), encoding="utf-8")


@dataclass(frozen=True)
class DiscretizationConfig:
    item_offset: int
    over_cutoff: float = 1.96
    under_cutoff: float = -1.96

    def __post_init__(self):
        if not self.under_cutoff < self.over_cutoff:
            raise ValueError("under_cutoff must be below over_cutoff")
        if self.item_offset < 1:
            raise ValueError("item_offset must be positive")


def discretize(matrix: Sequence[Sequence[float]], config: DiscretizationConfig | None = None) -> TransactionDB:
    """Turn a real-valued matrix into over/under-expression transactions.

    Each column is z-normalized with the population standard deviation. A cell
    at or above ``over_cutoff`` becomes item ``j``; at or below ``under_cutoff``
    it becomes item ``j + M``. Zero-variance columns are skipped with a warning.
    """
    if not matrix:
        raise CorpusError("empty matrix")
    width = len(matrix[0])
    for r, row in enumerate(matrix):
        if len(row) != width:
            raise CorpusError(f"ragged row {r}: {len(row)} values, expected {width}")
        for v in row:
            if not math.isfinite(v):
                raise CorpusError(f"non-finite value in row {r}")
    config = config or DiscretizationConfig(item_offset=width)

    zcols: list[list[float] | None] = []
    for j in range(width):
        col = [row[j] for row in matrix]
        mean = statistics.fmean(col)
        sd = statistics.pstdev(col, mu=mean)
        if sd == 0:
            log.warning("column %d has zero variance; skipped", j)
            zcols.append(None)
        else:
            zcols.append([(v - mean) / sd for v in col])

    rows = []
    for r in range(len(matrix)):
        row = []
        for j, z in enumerate(zcols):
            if z is None:
                continue
            if z[r] >= config.over_cutoff:
                row.append(j)
            elif z[r] <= config.under_cutoff:
                row.append(j + config.item_offset)
        rows.append(row)
    empty = sum(1 for row in rows if not row)
    if empty:
        log.warning("%d rows had no expressed cell and were dropped", empty)
    if empty == len(rows):
        raise CorpusError("no row has an expressed cell")
    return TransactionDB.from_transactions(rows)


def read_matrix_csv(path: str | Path, header: bool = False) -> list[list[float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if header:
            next(reader, None)
        out = []
        for lineno, rec in enumerate(reader, 2 if header else 1):
            if not rec:
                continue
            try:
                out.append([float(x) for x in rec])
            except ValueError:
                raise CorpusError(f"{path}:{lineno}: non-numeric cell") from None
    return out
