"""Command-line entry point.

Exit codes: 0 ok, 2 bad flags, 3 unusable input or file format, 4 guard
violation or representation kind mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .corpus import CorpusError, DiscretizationConfig, discretize, load_fimi, read_matrix_csv, write_fimi
from .gmjp import ConfigError, MiningConfig, mine
from .opt import mine_opt
from .oracle import Lattice, OracleGuardError, lattice_dot
from .representations import (
    BondInterval,
    CondensedRepresentation,
    KindMismatch,
    PatternSet,
    RepresentationError,
    answer,
    compactness,
    derive,
    read_result,
    regenerate_rcp,
    write_result,
)
from .rules import (
    RuleError,
    classification_rules,
    evaluate,
    filter_igb,
    generate_generic_rules,
    read_rules,
    write_rules,
)

log = logging.getLogger("bondminer")


class UsageError(Exception):
    pass


def parse_minsupp(text: str) -> int | Fraction:
    """``"4"`` is an absolute count; ``"35%"`` or ``"0.35"`` is relative to |T|."""
    text = text.strip()
    try:
        if text.endswith("%"):
            return Fraction(text[:-1]) / 100
        if "." in text or "/" in text:
            return Fraction(text)
        return int(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --minsupp {text!r}") from None


def parse_fraction(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad {flag} {text!r}") from None


def parse_ids(text: str) -> tuple[int, ...]:
    try:
        ids = tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"bad item list {text!r}") from None
    if not ids:
        raise UsageError("empty item list")
    return ids


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _manifest_path(out: Path, given: str | None) -> Path:
    return Path(given) if given else out.with_name(out.name + ".manifest.json")


def _fmt(b: Fraction) -> str:
    return f"{b.numerator}/{b.denominator}"


def _oracle_result(db, config: MiningConfig):
    minsupp = config.absolute_minsupp(db.transaction_count)
    lattice = Lattice(db)
    fam = lattice.families(minsupp, config.minbond)
    T = db.transaction_count
    if config.scenario in ("FCP", "RCP"):
        records = sorted(fam[config.scenario], key=lambda r: (len(r.itemset), r.itemset))
        result = PatternSet(config.scenario, tuple(records), T, minsupp, config.minbond)
    elif config.scenario == "RCPR":
        result = CondensedRepresentation("RCPR", fam["MRCP"], fam["CRCP"], T, minsupp, config.minbond)
    else:
        result = CondensedRepresentation("RFCCP", frozenset(), fam["FCCP"], T, minsupp, config.minbond,
                                         generators=fam["FMCP"])
    return result, fam


def _run_miner(name: str, db, config: MiningConfig, workers: int):
    if name == "oracle":
        return _oracle_result(db, config)[0]
    return (mine if name == "gmjp" else mine_opt)(db, config, workers)


def cmd_mine(args) -> int:
    path = Path(args.input)
    timings = {}
    t0 = time.perf_counter()
    db = load_fimi(path)
    timings["load"] = time.perf_counter() - t0
    config = MiningConfig(parse_minsupp(args.minsupp), parse_fraction(args.minbond, "--minbond"),
                          args.scenario.upper())
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")

    t0 = time.perf_counter()
    result = _run_miner(args.miner, db, config, args.workers)
    timings["mine"] = time.perf_counter() - t0
    if args.derive:
        if not isinstance(result, CondensedRepresentation) or result.kind != "RCPR":
            raise KindMismatch("--derive needs --scenario rcpr")
        result = derive(args.derive, result)

    out = Path(args.out)
    write_result(result, out, db.item_names)
    counts: dict[str, int] = {}
    if isinstance(result, PatternSet):
        counts["patterns"] = len(result.records)
        print(f"{result.kind}: {len(result.records)} patterns")
    else:
        counts.update(minimal=len(result.minimal_part), closed=len(result.closed_part), distinct=result.size())
        if result.generators:
            counts["generators"] = len(result.generators)
        print(f"{result.kind}: minimal={counts['minimal']} closed={counts['closed']} distinct={counts['distinct']}")
        if args.full_count:
            full_scenario = "RCP" if result.kind != "RFCCP" else "FCP"
            t0 = time.perf_counter()
            full = _run_miner(args.miner, db, MiningConfig(config.minsupp, config.minbond, full_scenario),
                              args.workers)
            timings["full_count"] = time.perf_counter() - t0
            counts["full"] = len(full.records)
            rate = compactness(result, len(full.records)) if full.records else None
            counts_line = f"{full_scenario}: {len(full.records)} patterns"
            if rate is not None:
                counts_line += f"; compactness {_fmt(rate)} ({float(rate):.2%})"
            print(counts_line)
    if args.dot:
        fam = _oracle_result(db, config)[1]
        Path(args.dot).write_text(lattice_dot(db, fam), encoding="utf-8")

    _write_manifest(_manifest_path(out, args.manifest), {
        "command": "mine",
        "version": __version__,
        "input": {"path": str(path), "sha256": _digest(path),
                  "transactions": db.transaction_count, "items": db.item_count,
                  "dropped_empty": db.dropped_empty},
        "thresholds": {"minsupp": result.minsupp, "minsupp_arg": args.minsupp, "minbond": _fmt(config.minbond)},
        "scenario": config.scenario,
        "kind": result.kind,
        "miner": args.miner,
        "workers": args.workers,
        "outputs": [str(out)] + ([args.dot] if args.dot else []),
        "timings_s": timings,
        "counts": counts,
    })
    return 0


def _load_rep(path) -> CondensedRepresentation:
    rep = read_result(path)
    if not isinstance(rep, CondensedRepresentation):
        raise KindMismatch(f"{path} holds a {rep.kind} pattern set, not a representation")
    return rep


def cmd_query(args) -> int:
    rep = _load_rep(args.rep)
    itemset = parse_ids(args.itemset)
    res = answer(rep, itemset)
    positive = "FREQUENT_CORRELATED" if rep.kind == "RFCCP" else "RARE_CORRELATED"
    if res is None:
        print(f"NOT_{positive}")
    elif isinstance(res, BondInterval):
        exact = res.conj_lo == res.conj_hi and res.disj_lo == res.disj_hi
        print(f"{positive} {'exact' if exact else 'approx'} conj=[{res.conj_lo},{res.conj_hi}] "
              f"disj=[{res.disj_lo},{res.disj_hi}] bond=[{_fmt(res.bond_lo)},{_fmt(res.bond_hi)}]")
    else:
        print(f"{positive} conj={res.conj} disj={res.disj} neg={res.neg(rep.transaction_count)} "
              f"bond={_fmt(res.bond)}")
    return 0


def cmd_regenerate(args) -> int:
    rep = _load_rep(args.rep)
    t0 = time.perf_counter()
    records = regenerate_rcp(rep)
    elapsed = time.perf_counter() - t0
    out = Path(args.out)
    write_result(PatternSet("RCP", tuple(records), rep.transaction_count, rep.minsupp, rep.minbond), out)
    print(f"RCP: {len(records)} patterns")
    _write_manifest(_manifest_path(out, args.manifest), {
        "command": "regenerate", "version": __version__,
        "input": {"path": args.rep, "sha256": _digest(Path(args.rep))},
        "outputs": [str(out)], "timings_s": {"regenerate": elapsed}, "counts": {"patterns": len(records)},
    })
    return 0


def cmd_derive(args) -> int:
    rep = _load_rep(args.rep)
    reduced = derive(args.kind, rep)
    write_result(reduced, args.out)
    print(f"{reduced.kind}: minimal={len(reduced.minimal_part)} closed={len(reduced.closed_part)} "
          f"distinct={reduced.size()}")
    return 0


def cmd_rules(args) -> int:
    rep = _load_rep(args.rep)
    minconf = parse_fraction(args.minconf, "--minconf")
    t0 = time.perf_counter()
    rules = generate_generic_rules(rep, minconf, include_approximate=args.approximate)
    if args.igb:
        gens = rep.generators if rep.kind == "RFCCP" else rep.minimal_part
        rules = filter_igb(rules, gens, minconf)
    if args.class_items:
        rules = classification_rules(rules, parse_ids(args.class_items))
    elapsed = time.perf_counter() - t0
    out = Path(args.out)
    write_rules(rules, out)
    exact = sum(r.exact for r in rules)
    print(f"rules: {len(rules)} (exact {exact}, approx {len(rules) - exact})")
    _write_manifest(_manifest_path(out, args.manifest), {
        "command": "rules", "version": __version__,
        "input": {"path": args.rep, "sha256": _digest(Path(args.rep))},
        "minconf": _fmt(minconf), "approximate": args.approximate, "igb": args.igb,
        "class_items": args.class_items, "outputs": [str(out)],
        "timings_s": {"rules": elapsed}, "counts": {"rules": len(rules), "exact": exact},
    })
    return 0


def cmd_classify(args) -> int:
    rules = read_rules(args.rules)
    classes = set(parse_ids(args.class_items))
    db = load_fimi(args.input)
    labeled = []
    for row in db.transactions():
        names = set(db.decode(row))
        found = names & classes
        if len(found) != 1:
            raise CorpusError(f"{args.input}: each transaction needs exactly one class item, got {sorted(found)}")
        labeled.append((names - classes, found.pop()))
    default = int(args.default_label) if args.default_label is not None else None
    report = evaluate(rules, labeled, default)
    print(f"accuracy {_fmt(report.accuracy)} ({float(report.accuracy):.4f})")
    if args.report:
        Path(args.report).write_text(report.to_csv(), encoding="utf-8")
    else:
        sys.stdout.write(report.to_csv())
    return 0


def cmd_discretize(args) -> int:
    matrix = read_matrix_csv(args.csv, header=args.header)
    if not matrix:
        raise CorpusError(f"{args.csv}: no rows")
    config = DiscretizationConfig(item_offset=len(matrix[0]), over_cutoff=args.over, under_cutoff=args.under)
    db = discretize(matrix, config)
    write_fimi(db, args.out)
    print(f"transactions: {db.transaction_count} items: {db.item_count}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bondminer", description="Correlated pattern mining under the bond measure.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mine", help="mine a pattern set or representation")
    m.add_argument("--input", required=True)
    m.add_argument("--minsupp", required=True, help="absolute count N or percentage P%%")
    m.add_argument("--minbond", required=True, help="NUM/DEN or decimal")
    m.add_argument("--scenario", default="rcpr", type=str.lower, choices=["fcp", "rfccp", "rcp", "rcpr"])
    m.add_argument("--miner", default="gmjp", choices=["gmjp", "opt", "oracle"])
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--out", required=True)
    m.add_argument("--manifest")
    m.add_argument("--derive", choices=["MMaxCR", "MinMCR", "MinMMaxCR"],
                   help="write a reduced representation instead of the RCPR")
    m.add_argument("--full-count", action="store_true", help="also count the full set and report compactness")
    m.add_argument("--dot", help="write the oracle lattice as Graphviz DOT")
    m.set_defaults(func=cmd_mine)

    q = sub.add_parser("query", help="query a representation file")
    q.add_argument("--rep", required=True)
    q.add_argument("--itemset", required=True, help='space-separated original ids, e.g. "1 3 5"')
    q.set_defaults(func=cmd_query)

    r = sub.add_parser("regenerate", help="rebuild the full RCP set from an RCPR file")
    r.add_argument("--rep", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--manifest")
    r.set_defaults(func=cmd_regenerate)

    d = sub.add_parser("derive", help="reduce an RCPR file")
    d.add_argument("--rep", required=True)
    d.add_argument("--kind", required=True, choices=["MMaxCR", "MinMCR", "MinMMaxCR"])
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_derive)

    g = sub.add_parser("rules", help="derive generic association rules")
    g.add_argument("--rep", required=True)
    g.add_argument("--minconf", required=True)
    g.add_argument("--approximate", action="store_true", help="also pair generators with larger closed patterns")
    g.add_argument("--igb", action="store_true", help="apply the IGB minimal-premise filter")
    g.add_argument("--class-items", help="keep only rules concluding on one of these ids")
    g.add_argument("--out", required=True)
    g.add_argument("--manifest")
    g.set_defaults(func=cmd_rules)

    c = sub.add_parser("classify", help="evaluate a rule file on labelled transactions")
    c.add_argument("--rules", required=True)
    c.add_argument("--input", required=True, help="FIMI file, one class item per transaction")
    c.add_argument("--class-items", required=True)
    c.add_argument("--default-label")
    c.add_argument("--report", help="CSV path for the per-class report")
    c.set_defaults(func=cmd_classify)

    z = sub.add_parser("discretize", help="z-score a CSV matrix into FIMI transactions")
    z.add_argument("--csv", required=True)
    z.add_argument("--header", action="store_true")
    z.add_argument("--over", type=float, default=1.96)
    z.add_argument("--under", type=float, default=-1.96)
    z.add_argument("--out", required=True)
    z.set_defaults(func=cmd_discretize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"bondminer: error: {exc}", file=sys.stderr)
        return 2
    except (OracleGuardError, KindMismatch) as exc:
        print(f"bondminer: error: {exc}", file=sys.stderr)
        return 4
    except (CorpusError, RepresentationError, RuleError, OSError) as exc:
        print(f"bondminer: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
