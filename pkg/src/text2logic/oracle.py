"""Truth-table oracle, independent of the CNF/DPLL path.

A formula over n variables is evaluated on all 2**n rows at once: each
subformula becomes a 2**n-bit integer whose bit r is its value in row r,
where row r sets variable i true iff bit i of r is set.
"""

from __future__ import annotations

from typing import Sequence

from .logic import And, Atom, Const, Formula, Iff, Implies, Not, Or, Xor, free_symbols


def truth_table(f: Formula, names: Sequence[str]) -> int:
    n = len(names)
    rows = 1 << n
    full = (1 << rows) - 1
    cols = {}
    for i, name in enumerate(names):
        # bit pattern of variable i: blocks of 2**i zeros then 2**i ones
        block = ((1 << (1 << i)) - 1) << (1 << i)
        period = 1 << (i + 1)
        col = 0
        for start in range(0, rows, period):
            col |= block << start
        cols[name] = col & full

    def go(g: Formula) -> int:
        if isinstance(g, Atom):
            return cols[g.name]
        if isinstance(g, Const):
            return full if g.value else 0
        if isinstance(g, Not):
            return full & ~go(g.arg)
        if isinstance(g, And):
            r = full
            for a in g.args:
                r &= go(a)
            return r
        if isinstance(g, Or):
            r = 0
            for a in g.args:
                r |= go(a)
            return r
        left, right = go(g.left), go(g.right)
        if isinstance(g, Xor):
            return left ^ right
        if isinstance(g, Implies):
            return (full & ~left) | right
        if isinstance(g, Iff):
            return full & ~(left ^ right)
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


def rows_to_models(table: int, names: Sequence[str]) -> list[dict[str, bool]]:
    out = []
    for r in range(1 << len(names)):
        if (table >> r) & 1:
            out.append({name: bool((r >> i) & 1) for i, name in enumerate(names)})
    return out


def models(f: Formula, names: Sequence[str]) -> list[dict[str, bool]]:
    return rows_to_models(truth_table(f, names), names)


def is_satisfiable(f: Formula) -> bool:
    return truth_table(f, free_symbols(f)) != 0


def are_equivalent(f: Formula, g: Formula) -> bool:
    names = list(dict.fromkeys(free_symbols(f) + free_symbols(g)))
    return truth_table(f, names) == truth_table(g, names)


def entails(premise: Formula, conclusion: Formula) -> bool:
    names = list(dict.fromkeys(free_symbols(premise) + free_symbols(conclusion)))
    return truth_table(premise, names) & ~truth_table(conclusion, names) == 0
