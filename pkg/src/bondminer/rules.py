"""Generic association rules, the IGB filter and a best-rule associative classifier."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .corpus import TransactionDB
from .measures import Itemset, PatternRecord, cover
from .representations import CondensedRepresentation, KindMismatch, _closure

log = logging.getLogger(__name__)


class RuleError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class AssociationRule:
    premise: Itemset
    conclusion: Itemset
    support: int
    confidence: Fraction
    class_label: Hashable | None = None

    def __post_init__(self):
        if not self.conclusion:
            raise RuleError("empty conclusion")
        if set(self.premise) & set(self.conclusion):
            raise RuleError("premise and conclusion overlap")
        if not 0 < self.confidence <= 1:
            raise RuleError(f"confidence {self.confidence} outside (0, 1]")

    @property
    def exact(self) -> bool:
        return self.confidence == 1

    @property
    def itemset(self) -> Itemset:
        return tuple(sorted(self.premise + self.conclusion))


def _check_minconf(minconf) -> Fraction:
    minconf = Fraction(minconf)
    if not 0 < minconf <= 1:
        raise RuleError(f"minconf must lie in (0, 1], got {minconf}")
    return minconf


def _rule(g: PatternRecord, f: PatternRecord) -> AssociationRule:
    rest = tuple(i for i in f.itemset if i not in g.itemset)
    return AssociationRule(g.itemset, rest, f.conj, Fraction(f.conj, g.conj))


def rule_order(rules: Iterable[AssociationRule]) -> list[AssociationRule]:
    return sorted(rules, key=lambda r: (len(r.premise), r.premise, len(r.conclusion), r.conclusion))


def generate_generic_rules(rep: CondensedRepresentation, minconf, generators=None,
                           include_approximate: bool = False) -> list[AssociationRule]:
    """Rules ``g => F \\ g`` from generators and closed patterns.

    By default each generator is paired with its own closure, which only gives
    exact rules. ``include_approximate`` also pairs it with every larger closed
    pattern of the representation, giving the approximate rules.
    """
    minconf = _check_minconf(minconf)
    if rep.kind not in ("RCPR", "RFCCP"):
        raise KindMismatch(f"rule generation needs RCPR or RFCCP, got {rep.kind}")
    if generators is None:
        generators = rep.generators if rep.kind == "RFCCP" else rep.minimal_part
    out = set()
    for g in generators:
        gm = rep._mask(g.itemset)
        if gm is None:
            continue
        if include_approximate:
            targets = [f for m, f in rep._closed_masks if m & gm == gm]
        else:
            f = _closure(rep, gm)
            targets = [f] if f is not None else []
        for f in targets:
            if len(f.itemset) == len(g.itemset):
                continue
            rule = _rule(g, f)
            if rule.confidence >= minconf:
                out.add(rule)
    return rule_order(out)


def filter_igb(rules: Iterable[AssociationRule], all_generators: Iterable[PatternRecord] | None = None,
               minconf=None) -> list[AssociationRule]:
    """Keep only minimal-premise rules per closed pattern.

    A rule ``g => F \\ g`` is dropped when the set also holds a rule
    ``g1 => F \\ g1`` for the same F with ``g1`` a strict subset of ``g`` (a
    generator, when ``all_generators`` is given) and confidence at least
    ``minconf``. Over the full generator/closure pairing this is the IGB
    condition; since dominators come from the set itself, a closed pattern
    never loses its last rule.
    """
    rules = list(rules)
    minconf = _check_minconf(minconf) if minconf is not None else Fraction(0)
    gens = None if all_generators is None else {g.itemset for g in all_generators}
    by_closure: dict[Itemset, list[AssociationRule]] = {}
    for r in rules:
        by_closure.setdefault(r.itemset, []).append(r)
    kept = []
    for r in rules:
        g = set(r.premise)
        dominated = any(
            len(o.premise) < len(r.premise) and g.issuperset(o.premise) and o.confidence >= minconf
            and (gens is None or o.premise in gens)
            for o in by_closure[r.itemset]
        )
        if not dominated:
            kept.append(r)
    return rule_order(kept)


def classification_rules(rules: Iterable[AssociationRule], class_items: Iterable[Hashable]) -> list[AssociationRule]:
    """Keep rules concluding on exactly one class item, labelled with it."""
    classes = set(class_items)
    if not classes:
        raise RuleError("no class items given")
    out = []
    for r in rules:
        hits = [i for i in r.conclusion if i in classes]
        if not hits:
            continue
        if len(hits) > 1:
            log.warning("rule %s => %s concludes on several classes; dropped", r.premise, r.conclusion)
            continue
        if set(r.premise) & classes:
            continue
        out.append(AssociationRule(r.premise, r.conclusion, r.support, r.confidence, hits[0]))
    return rule_order(out)


def _rank(r: AssociationRule):
    return (-r.confidence, -r.support, len(r.premise), r.premise)


def classify(rules: Sequence[AssociationRule], transaction: Iterable[Hashable], default_label):
    """Label of the best firing rule, or the default when none fires."""
    items = set(transaction)
    best = None
    for r in rules:
        if r.class_label is None or not items.issuperset(r.premise):
            continue
        if best is None or _rank(r) < _rank(best):
            best = r
    return default_label if best is None else best.class_label


def majority_label(labels: Iterable[Hashable]):
    counts = Counter(labels)
    if not counts:
        raise RuleError("no labels")
    # most frequent, ties broken by the smallest label
    return min(counts, key=lambda k: (-counts[k], str(k)))


@dataclass(frozen=True)
class Evaluation:
    accuracy: Fraction
    per_class: tuple[tuple[Hashable, int, int], ...]  # (label, n, correct)

    def to_csv(self) -> str:
        lines = ["class,n,correct,rate"]
        for label, n, correct in self.per_class:
            lines.append(f"{label},{n},{correct},{Fraction(correct, n)}")
        return "\n".join(lines) + "\n"


def evaluate(rules: Sequence[AssociationRule], labeled_transactions: Iterable[tuple[Iterable, Hashable]],
             default_label=None) -> Evaluation:
    """Accuracy (correct / total) plus per-class detection counts."""
    data = [(set(t), label) for t, label in labeled_transactions]
    if not data:
        raise RuleError("no transactions to evaluate")
    if default_label is None:
        default_label = majority_label(label for _, label in data)
    total, correct = Counter(), Counter()
    for items, label in data:
        total[label] += 1
        if classify(rules, items, default_label) == label:
            correct[label] += 1
    per_class = tuple((k, total[k], correct[k]) for k in sorted(total, key=str))
    return Evaluation(Fraction(sum(correct.values()), len(data)), per_class)


def verify_rule(db: TransactionDB, rule: AssociationRule) -> bool:
    """Recompute support and confidence from the raw bitsets."""
    whole = cover(db, rule.itemset).bit_count()
    prem = cover(db, rule.premise).bit_count() if rule.premise else db.transaction_count
    return whole == rule.support and prem > 0 and Fraction(whole, prem) == rule.confidence


# -- files ------------------------------------------------------------------

def format_rules(rules: Iterable[AssociationRule], names: Sequence[Hashable] | None = None) -> str:
    def ids(items):
        vals = sorted(names[i] for i in items) if names is not None else list(items)
        return " ".join(str(v) for v in vals)

    rows = []
    for r in rules:
        label = "" if r.class_label is None else str(names[r.class_label] if names is not None else r.class_label)
        c = r.confidence
        rows.append(f"{ids(r.premise)} ⇒ {ids(r.conclusion)};{r.support};{c.numerator}/{c.denominator};"
                    f"{'exact' if r.exact else 'approx'};{label}\n")
    return "".join(rows)


def write_rules(rules, path: str | Path, names=None) -> None:
    Path(path).write_text(format_rules(rules, names), encoding="utf-8", newline="\n")


def read_rules(path: str | Path) -> list[AssociationRule]:
    out = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        where = f"{path}:{lineno}"
        fields = line.split(";")
        if len(fields) != 5 or "⇒" not in fields[0]:
            raise RuleError(f"{where}: malformed rule line")
        left, _, right = fields[0].partition("⇒")
        try:
            premise = tuple(sorted(int(t) for t in left.split()))
            conclusion = tuple(sorted(int(t) for t in right.split()))
            support = int(fields[1])
            conf = Fraction(fields[2])
            label = int(fields[4]) if fields[4].strip() else None
            rule = AssociationRule(premise, conclusion, support, conf, label)
        except (ValueError, ZeroDivisionError) as exc:
            raise RuleError(f"{where}: {exc}") from None
        if fields[3] != ("exact" if rule.exact else "approx"):
            raise RuleError(f"{where}: exact flag disagrees with confidence")
        out.append(rule)
    return out
