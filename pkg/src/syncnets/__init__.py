"""Proof nets with synchronization links, their token machines, and a
linear quantum lambda calculus compiled into them."""

from .formula import (
    BOT,
    ONE,
    Bot,
    Formula,
    NegVar,
    One,
    Par,
    Polarity,
    Tensor,
    Var,
    atom_addresses,
    negate,
    parse_formula,
    polarity_of,
    show,
    subformula_at,
)
from .net import Link, Net, NetBuilder, NetError, QuantumNet, Sort, check, validate, zero_graph
from .canon import canonical_code, iso_equal
from .correctness import closure, find_switching_cycle, is_correct, polarized_order
from .qregister import BUILTIN_GATES, QuantumRegister, UnitarySpec

__all__ = [
    "BOT", "ONE", "Bot", "Formula", "NegVar", "One", "Par", "Polarity", "Tensor", "Var",
    "atom_addresses", "negate", "parse_formula", "polarity_of", "show", "subformula_at",
    "Link", "Net", "NetBuilder", "NetError", "QuantumNet", "Sort", "check", "validate", "zero_graph",
    "canonical_code", "iso_equal",
    "closure", "find_switching_cycle", "is_correct", "polarized_order",
    "BUILTIN_GATES", "QuantumRegister", "UnitarySpec",
]
