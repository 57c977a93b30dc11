"""Propositional formulas, vocabularies and cardinality builders.

Formulas are immutable, hashable trees. ``And`` and ``Or`` are n-ary (at
least two arguments); nesting is preserved exactly as constructed, so
``And(And(a, b), c)`` and ``And(a, b, c)`` are structurally different even
though they are equivalent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
# keywords of the text syntax, so never atom names
RESERVED = frozenset(
    {"NOT", "AND", "OR", "XOR", "IMPLIES", "IFF", "TRUE", "FALSE"}
)


def valid_identifier(name: object) -> bool:
    return isinstance(name, str) and bool(IDENT_RE.match(name)) and name not in RESERVED


class LogicError(Exception):
    pass


class UnboundSymbol(LogicError, KeyError):
    def __init__(self, symbol: str):
        super().__init__(symbol)
        self.symbol = symbol

    def __str__(self) -> str:
        return f"unbound symbol {self.symbol!r}"


class EmptyAtomList(LogicError, ValueError):
    pass


class DuplicateAtom(LogicError, ValueError):
    pass


class KOutOfRange(LogicError, ValueError):
    pass


# -- vocabulary ---------------------------------------------------------------


@dataclass(frozen=True)
class Symbol:
    id: str
    gloss: str = ""

    def __post_init__(self) -> None:
        if not valid_identifier(self.id):
            raise ValueError(f"invalid symbol id {self.id!r}")


@dataclass(frozen=True)
class Vocabulary:
    """Ordered set of declared symbols; order is declaration order."""

    symbols: tuple[Symbol, ...] = ()
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        index: dict[str, int] = {}
        for i, sym in enumerate(symbols):
            if sym.id in index:
                raise DuplicateAtom(f"duplicate symbol {sym.id!r}")
            index[sym.id] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, *ids: str) -> "Vocabulary":
        return cls(tuple(Symbol(i) for i in ids))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.symbols)

    def __contains__(self, symbol_id: object) -> bool:
        return symbol_id in self._index

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, symbol_id: str) -> Symbol:
        return self.symbols[self._index[symbol_id]]

    def gloss(self, symbol_id: str) -> str:
        return self[symbol_id].gloss


# -- formulas -----------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self) -> None:
        if not valid_identifier(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]

    def __init__(self, *args: "Formula"):
        if len(args) < 2:
            raise ValueError("And needs at least two arguments")
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]

    def __init__(self, *args: "Formula"):
        if len(args) < 2:
            raise ValueError("Or needs at least two arguments")
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Xor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Const, Not, And, Or, Xor, Implies, Iff]
Assignment = Mapping[str, bool]

TRUE = Const(True)
FALSE = Const(False)


def atoms(*names: str) -> tuple[Atom, ...]:
    return tuple(Atom(n) for n in names)


def conj(formulas: Iterable[Formula]) -> Formula:
    """And over ``formulas``, collapsing the 0- and 1-argument cases."""
    fs = tuple(formulas)
    if not fs:
        return TRUE
    if len(fs) == 1:
        return fs[0]
    return And(*fs)


def disj(formulas: Iterable[Formula]) -> Formula:
    fs = tuple(formulas)
    if not fs:
        return FALSE
    if len(fs) == 1:
        return fs[0]
    return Or(*fs)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, Const)):
        return ()
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    return (f.left, f.right)


def evaluate(f: Formula, a: Assignment) -> bool:
    """Classical truth value of ``f`` under the total assignment ``a``."""
    if isinstance(f, Atom):
        try:
            return bool(a[f.name])
        except KeyError:
            raise UnboundSymbol(f.name) from None
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.arg, a)
    if isinstance(f, And):
        # evaluate every argument so unbound atoms are always reported
        return all([evaluate(g, a) for g in f.args])
    if isinstance(f, Or):
        return any([evaluate(g, a) for g in f.args])
    left, right = evaluate(f.left, a), evaluate(f.right, a)
    if isinstance(f, Xor):
        return left != right
    if isinstance(f, Implies):
        return (not left) or right
    if isinstance(f, Iff):
        return left == right
    raise TypeError(f"not a formula: {f!r}")


def free_symbols(f: Formula) -> tuple[str, ...]:
    """Atoms of ``f`` in first-occurrence (left-to-right) order."""
    seen: dict[str, None] = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            seen.setdefault(g.name)
        else:
            stack.extend(reversed(children(g)))
    return tuple(seen)


def size(f: Formula) -> int:
    return 1 + sum(size(g) for g in children(f))


# -- cardinality --------------------------------------------------------------


def _check_atoms(names: Sequence[str]) -> tuple[Atom, ...]:
    if not names:
        raise EmptyAtomList("atom list is empty")
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise DuplicateAtom(f"duplicate atom {dup!r}")
    return tuple(Atom(n) for n in names)


def exactly_one(names: Sequence[str]) -> Formula:
    """Disjunction of the n cases where one atom holds and the rest do not."""
    xs = _check_atoms(list(names))
    if len(xs) == 1:
        return xs[0]
    cases = [conj(x if j == i else Not(x) for j, x in enumerate(xs)) for i in range(len(xs))]
    return Or(*cases)


def at_least(k: int, names: Sequence[str]) -> Formula:
    names = list(names)
    if len(set(names)) != len(names):
        _check_atoms(names)
    if not 0 <= k <= len(names):
        raise KOutOfRange(f"k={k} outside 0..{len(names)}")
    if k == 0:
        return TRUE
    xs = tuple(Atom(n) for n in names)
    if k == 1:
        return disj(xs)
    return disj(conj(c) for c in combinations(xs, k))


def at_most(k: int, names: Sequence[str]) -> Formula:
    """Conjunction forbidding every (k+1)-subset from being all true."""
    names = list(names)
    if len(set(names)) != len(names):
        _check_atoms(names)
    if not 0 <= k <= len(names):
        raise KOutOfRange(f"k={k} outside 0..{len(names)}")
    if k == len(names):
        return TRUE
    xs = tuple(Atom(n) for n in names)
    return conj(Not(conj(c)) for c in combinations(xs, k + 1))
