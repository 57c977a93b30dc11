"""Seeded random formulas for property tests and the oracle sweep."""

from __future__ import annotations

import random
from typing import Sequence

from .logic import And, Atom, Const, Formula, Iff, Implies, Not, Or, Xor


def random_formula(
    rng: random.Random,
    symbols: Sequence[str],
    max_depth: int = 4,
    const_prob: float = 0.03,
) -> Formula:
    """Draw a formula over ``symbols`` using every connective."""
    if max_depth <= 0 or rng.random() < 0.25:
        if rng.random() < const_prob:
            return Const(rng.random() < 0.5)
        return Atom(rng.choice(symbols))
    d = max_depth - 1
    kind = rng.randrange(6)
    if kind == 0:
        return Not(random_formula(rng, symbols, d, const_prob))
    if kind in (1, 2):
        n = rng.choice((2, 2, 2, 3, 4))
        args = [random_formula(rng, symbols, d, const_prob) for _ in range(n)]
        return And(*args) if kind == 1 else Or(*args)
    cls = (Xor, Implies, Iff)[kind - 3]
    return cls(random_formula(rng, symbols, d, const_prob), random_formula(rng, symbols, d, const_prob))


def symbol_pool(n: int, prefix: str = "v") -> list[str]:
    return [f"{prefix}{i}" for i in range(1, n + 1)]
