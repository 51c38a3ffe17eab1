"""ramseykit: exact tower arithmetic, bound certification and brute-force
oracles for Ramsey-type numbers on hypercubes."""

from ramseykit.hyperop import (
    Arrow,
    FRec,
    Mul,
    Nat,
    Ordering,
    Pow,
    TowerExpr,
    compare,
    eval_exact,
    parse_sexpr,
    to_sexpr,
)

__all__ = [
    "Arrow",
    "FRec",
    "Mul",
    "Nat",
    "Ordering",
    "Pow",
    "TowerExpr",
    "compare",
    "eval_exact",
    "parse_sexpr",
    "to_sexpr",
]

__version__ = "0.1.0"
