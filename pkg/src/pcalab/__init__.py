"""Kleene's second model K2 under two codings, the partial model B, and an
embedding of finite partial magmas into K2, all evaluated lazily under fuel."""

from .foundations import (
    Budget, Diverged, FuelOut, PartialReal, Real, Value, cons, eval_at, join, parse_real,
    prefix, prefix_eq, zeros,
)
from .seqcode import seq_decode, seq_encode

__version__ = "0.1.0"

__all__ = [
    "Budget", "Diverged", "FuelOut", "PartialReal", "Real", "Value", "cons", "eval_at",
    "join", "parse_real", "prefix", "prefix_eq", "zeros", "seq_decode", "seq_encode",
]
