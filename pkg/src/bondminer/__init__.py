"""Correlated pattern mining under the bond measure."""

from .corpus import CorpusError, DiscretizationConfig, TransactionDB, discretize, load_fimi, parse_fimi
from .gmjp import MiningConfig, mine
from .measures import PatternRecord, bond, supports
from .opt import mine_opt
from .representations import (
    BondInterval,
    CondensedRepresentation,
    PatternSet,
    build_rcpr,
    compactness,
    derive,
    query,
    query_approx,
    query_mmaxcr,
    regenerate_rcp,
)

__version__ = "0.1.0"

__all__ = [
    "BondInterval", "CondensedRepresentation", "CorpusError", "DiscretizationConfig",
    "MiningConfig", "PatternRecord", "PatternSet", "TransactionDB", "bond", "build_rcpr",
    "compactness", "derive", "discretize", "load_fimi", "mine", "mine_opt", "parse_fimi",
    "query", "query_approx", "query_mmaxcr", "regenerate_rcp", "supports",
]
