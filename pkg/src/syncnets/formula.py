"""MLL formulas in negation normal form.

Formulas are immutable trees.  Negation is a function, not a constructor;
implication only exists in the text syntax and is parsed to a par.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class One(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class NegVar(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Tensor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Par(Formula):
    left: Formula
    right: Formula


ONE = One()
BOT = Bot()

ATOMS = (One, Bot, Var, NegVar)


class Polarity(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    UNPOLARIZED = "0"

    def dual(self) -> "Polarity":
        if self is Polarity.POSITIVE:
            return Polarity.NEGATIVE
        if self is Polarity.NEGATIVE:
            return Polarity.POSITIVE
        return self


class InvalidAddress(ValueError):
    pass


class FormulaSyntaxError(ValueError):
    pass


def is_atom(a: Formula) -> bool:
    return isinstance(a, ATOMS)


@lru_cache(maxsize=None)
def negate(a: Formula) -> Formula:
    if isinstance(a, One):
        return BOT
    if isinstance(a, Bot):
        return ONE
    if isinstance(a, Var):
        return NegVar(a.name)
    if isinstance(a, NegVar):
        return Var(a.name)
    if isinstance(a, Tensor):
        return Par(negate(a.left), negate(a.right))
    if isinstance(a, Par):
        return Tensor(negate(a.left), negate(a.right))
    raise TypeError(f"not a formula: {a!r}")


@lru_cache(maxsize=None)
def polarity_of(a: Formula) -> Polarity:
    if isinstance(a, One):
        return Polarity.POSITIVE
    if isinstance(a, Bot):
        return Polarity.NEGATIVE
    if isinstance(a, Tensor):
        if polarity_of(a.left) is polarity_of(a.right) is Polarity.POSITIVE:
            return Polarity.POSITIVE
        return Polarity.UNPOLARIZED
    if isinstance(a, Par):
        if polarity_of(a.left) is polarity_of(a.right) is Polarity.NEGATIVE:
            return Polarity.NEGATIVE
        return Polarity.UNPOLARIZED
    # propositional variables are never polarized
    return Polarity.UNPOLARIZED


def is_polarized(a: Formula) -> bool:
    return polarity_of(a) is not Polarity.UNPOLARIZED


@lru_cache(maxsize=None)
def signed_atoms(a: Formula) -> tuple[tuple[str, int], ...]:
    """Left-to-right atom occurrences as (address, sign), sign +1 or -1."""
    if isinstance(a, (One, Var)):
        return (("", 1),)
    if isinstance(a, (Bot, NegVar)):
        return (("", -1),)
    left = tuple(("l" + m, s) for m, s in signed_atoms(a.left))
    right = tuple(("r" + m, s) for m, s in signed_atoms(a.right))
    return left + right


def atom_addresses(a: Formula) -> list[str]:
    return [m for m, _ in signed_atoms(a)]


def atom_sign(a: Formula, m: str) -> int:
    atom = subformula_at(a, m)
    if not is_atom(atom):
        raise InvalidAddress(f"{m!r} does not end on an atom of {show(a)}")
    return 1 if isinstance(atom, (One, Var)) else -1


def subformula_at(a: Formula, m: str) -> Formula:
    node = a
    for i, step in enumerate(m):
        if not isinstance(node, (Tensor, Par)):
            raise InvalidAddress(f"address {m!r} leaves {show(a)} at position {i}")
        if step == "l":
            node = node.left
        elif step == "r":
            node = node.right
        else:
            raise InvalidAddress(f"bad address letter {step!r}")
    return node


@lru_cache(maxsize=None)
def weight(a: Formula) -> int:
    """Number of binary connectives."""
    if isinstance(a, (Tensor, Par)):
        return 1 + weight(a.left) + weight(a.right)
    return 0


def contains_bot(a: Formula) -> bool:
    if isinstance(a, Bot):
        return True
    if isinstance(a, (Tensor, Par)):
        return contains_bot(a.left) or contains_bot(a.right)
    return False


def lolli(a: Formula, b: Formula) -> Formula:
    return Par(negate(a), b)


# -- text syntax -------------------------------------------------------------

def show(a: Formula) -> str:
    if isinstance(a, One):
        return "1"
    if isinstance(a, Bot):
        return "bot"
    if isinstance(a, Var):
        return a.name
    if isinstance(a, NegVar):
        return "~" + a.name
    op = " * " if isinstance(a, Tensor) else " | "
    return f"({show(a.left)}{op}{show(a.right)})"


_TOKEN = re.compile(r"\s*(-o|⊸|[()*|~⊗⅋1]|⊥|[A-Za-z_][A-Za-z0-9_']*)")


def _tokenize(src: str) -> list[str]:
    out, pos = [], 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character at {pos}: {src[pos:pos + 10]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_formula(src: str) -> Formula:
    """Parse `1`, `bot`, `X`, `~X`, `*`, `|`, `-o` with parentheses.

    Binding strength: `*` over `|` over `-o`; all right associative.
    """
    toks = _tokenize(src)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormulaSyntaxError(f"expected {expected or 'a formula'} at token {pos}, got {tok!r}")
        pos += 1
        return tok

    def lolli_level():
        left = par_level()
        if peek() in ("-o", "⊸"):
            take()
            return lolli(left, lolli_level())
        return left

    def par_level():
        left = tensor_level()
        if peek() in ("|", "⅋"):
            take()
            return Par(left, par_level())
        return left

    def tensor_level():
        left = atom()
        if peek() in ("*", "⊗"):
            take()
            return Tensor(left, tensor_level())
        return left

    def atom():
        tok = take()
        if tok == "(":
            inner = lolli_level()
            take(")")
            return inner
        if tok == "~":
            return negate(atom())
        if tok == "1":
            return ONE
        if tok in ("bot", "⊥"):
            return BOT
        if tok[0].isalpha() or tok[0] == "_":
            return Var(tok)
        raise FormulaSyntaxError(f"unexpected token {tok!r}")

    result = lolli_level()
    if pos != len(toks):
        raise FormulaSyntaxError(f"trailing input at token {pos}: {toks[pos]!r}")
    return result
