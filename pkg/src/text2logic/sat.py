"""CNF conversion and a small DPLL solver.

Literals are DIMACS-style signed integers: variable ``v`` (1-based) is ``v``
when true and ``-v`` when false. The original symbols of a formula occupy
variables ``1..len(var_map)``; Tseitin auxiliaries follow.

The solver is plain DPLL: unit propagation over two watched literals,
pure-literal elimination, chronological backtracking, no learning. Branching
picks the unassigned variable with the most clause occurrences (ties to the
lowest index) and tries ``False`` first, so an instance with no clauses gets
the all-false model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

from .logic import (
    And,
    Atom,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Vocabulary,
    Xor,
    free_symbols,
)

Clause = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class CnfInstance:
    clauses: tuple[Clause, ...]
    var_map: dict[str, int]
    aux_count: int

    @property
    def num_originals(self) -> int:
        return len(self.var_map)

    @property
    def num_vars(self) -> int:
        return len(self.var_map) + self.aux_count

    def literal(self, symbol: str, value: bool = True) -> int:
        v = self.var_map[symbol]
        return v if value else -v

    def with_clauses(self, extra: Iterable[Sequence[int]]) -> "CnfInstance":
        return CnfInstance(
            self.clauses + tuple(tuple(c) for c in extra), self.var_map, self.aux_count
        )


@dataclass(frozen=True)
class Sat:
    model: dict[str, bool]
    # value of every variable, index 0 unused; includes auxiliaries
    values: tuple[bool, ...] = field(repr=False, default=())

    @property
    def satisfiable(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsat:
    @property
    def satisfiable(self) -> bool:
        return False


SatOutcome = Union[Sat, Unsat]


class _CnfBuilder:
    def __init__(self, originals: Sequence[str]):
        self.var_map = {name: i + 1 for i, name in enumerate(originals)}
        self.next_var = len(originals) + 1
        self.clauses: list[Clause] = []
        self._seen: set[Clause] = set()
        self._cache: dict[Formula, int] = {}

    def fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def add(self, lits: Iterable[int]) -> None:
        clause = tuple(dict.fromkeys(lits))
        if any(-lit in clause for lit in clause):
            return  # tautology
        if clause not in self._seen:
            self._seen.add(clause)
            self.clauses.append(clause)

    def lit(self, f: Formula) -> int:
        if isinstance(f, Atom):
            return self.var_map[f.name]
        if isinstance(f, Not):
            return -self.lit(f.arg)
        cached = self._cache.get(f)
        if cached is not None:
            return cached
        if isinstance(f, Const):
            t = self.fresh()
            self.add([t] if f.value else [-t])
        elif isinstance(f, (And, Or)):
            ls = [self.lit(g) for g in f.args]
            t = self.fresh()
            if isinstance(f, And):
                for x in ls:
                    self.add([-t, x])
                self.add([t] + [-x for x in ls])
            else:
                for x in ls:
                    self.add([t, -x])
                self.add([-t] + ls)
        else:
            p, q = self.lit(f.left), self.lit(f.right)
            t = self.fresh()
            if isinstance(f, Xor):
                self.add([-t, p, q])
                self.add([-t, -p, -q])
                self.add([t, -p, q])
                self.add([t, p, -q])
            elif isinstance(f, Implies):
                self.add([-t, -p, q])
                self.add([t, p])
                self.add([t, -q])
            elif isinstance(f, Iff):
                self.add([-t, -p, q])
                self.add([-t, p, -q])
                self.add([t, p, q])
                self.add([t, -p, -q])
            else:
                raise TypeError(f"not a formula: {f!r}")
        self._cache[f] = t
        return t


def to_cnf(f: Formula, variables: Optional[Sequence[str]] = None) -> CnfInstance:
    """Definitional Tseitin encoding of ``f``.

    Every auxiliary is tied to its subformula by a biconditional, so the
    models of the CNF projected onto the original variables are exactly the
    models of ``f``. ``variables`` fixes the order of the original variables
    (and may declare symbols ``f`` does not mention); symbols of ``f`` not
    listed are appended in first-occurrence order.
    """
    originals = list(dict.fromkeys(variables or ()))
    known = set(originals)
    originals += [s for s in free_symbols(f) if s not in known]
    b = _CnfBuilder(originals)
    b.add([b.lit(f)])
    return CnfInstance(tuple(b.clauses), b.var_map, b.next_var - 1 - len(originals))


class DpllSolver:
    """Mutable search state for one CNF instance; not shareable between threads."""

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]], pure_literals: bool = True):
        self.n = num_vars
        self.pure_literals = pure_literals
        self.value = [0] * (num_vars + 1)  # 1 true, -1 false, 0 unassigned
        self.trail: list[int] = []
        self.qhead = 0
        self.trail_lim: list[int] = []
        self.decisions: list[list] = []  # [literal, flipped]
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.retired: set[int] = set()
        self.level_clauses: dict[int, list[int]] = {}
        self.ok = True
        occurrences = [0] * (num_vars + 1)
        pending_units = []
        for raw in clauses:
            c = list(dict.fromkeys(raw))
            for lit in c:
                if not 1 <= abs(lit) <= num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{num_vars}")
                occurrences[abs(lit)] += 1
            if not c:
                self.ok = False
            elif len(c) == 1:
                pending_units.append(c[0])
            else:
                self._attach(c)
        self.order = sorted(range(1, num_vars + 1), key=lambda v: (-occurrences[v], v))
        for lit in pending_units:
            self.enqueue_root(lit)

    # -- bookkeeping ----------------------------------------------------------

    def val(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _assign(self, lit: int) -> None:
        self.value[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)

    def _attach(self, c: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(c)
        for lit in c[:2]:
            self.watches.setdefault(lit, []).append(ci)
        return ci

    def enqueue_root(self, lit: int) -> None:
        """Assert ``lit`` before any decision (unit clause or assumption)."""
        if self.decisions:
            raise RuntimeError("root assertions only before search starts")
        if not 1 <= abs(lit) <= self.n:
            raise ValueError(f"literal {lit} out of range 1..{self.n}")
        v = self.val(lit)
        if v == -1:
            self.ok = False
        elif v == 0:
            self._assign(lit)

    def _undo_to(self, start: int) -> None:
        for lit in self.trail[start:]:
            self.value[abs(lit)] = 0
        del self.trail[start:]
        self.qhead = min(self.qhead, start)

    @property
    def level(self) -> int:
        return len(self.decisions)

    # -- propagation ----------------------------------------------------------

    def propagate(self) -> bool:
        """Unit propagation to fixpoint; False on conflict."""
        value, clauses, watches, retired = self.value, self.clauses, self.watches, self.retired
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = watches.get(false_lit)
            if not ws:
                continue
            i = j = 0
            end = len(ws)
            while i < end:
                ci = ws[i]
                i += 1
                if ci in retired:
                    continue
                c = clauses[ci]
                if len(c) == 1:
                    ws[j] = ci
                    j += 1
                    while i < end:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    return False
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)] if first > 0 else -value[abs(first)]
                if fv == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if (value[abs(lk)] if lk > 0 else -value[abs(lk)]) != -1:
                        c[1], c[k] = lk, c[1]
                        watches.setdefault(lk, []).append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if fv == -1:
                        while i < end:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return False
                    self._assign(first)
            del ws[j:]
        return True

    def _assign_pure(self) -> bool:
        polarity: dict[int, int] = {}
        for c in self.clauses:
            if any(self.val(lit) == 1 for lit in c):
                continue
            for lit in c:
                if self.value[abs(lit)] == 0:
                    polarity[abs(lit)] = polarity.get(abs(lit), 0) | (1 if lit > 0 else 2)
        pure = [v if mask == 1 else -v for v, mask in sorted(polarity.items()) if mask != 3]
        for lit in pure:
            self._assign(lit)
        return bool(pure)

    # -- search ---------------------------------------------------------------

    def _decide(self, lit: int) -> None:
        self.trail_lim.append(len(self.trail))
        self.decisions.append([lit, False])
        self._assign(lit)

    def backtrack(self, keep: Optional[set[int]] = None) -> bool:
        """Flip the most recent unflipped decision.

        With ``keep``, only decisions on those variables are eligible and all
        later decisions are discarded. Returns False when nothing is left.
        """
        while self.decisions:
            self.retired.update(self.level_clauses.pop(len(self.decisions), ()))
            lit, flipped = self.decisions.pop()
            start = self.trail_lim.pop()
            self._undo_to(start)
            if not flipped and (keep is None or abs(lit) in keep):
                self.trail_lim.append(len(self.trail))
                self.decisions.append([-lit, True])
                self._assign(-lit)
                return True
        return False

    def _pick(self, order: Sequence[int]) -> int:
        for v in order:
            if self.value[v] == 0:
                return v
        return 0

    def search(self, order: Optional[Sequence[int]] = None) -> bool:
        """Run (or resume) the search; True when every clause is satisfied."""
        if not self.ok:
            return False
        order = self.order if order is None else order
        while True:
            if not self.propagate():
                if not self.backtrack():
                    self.ok = False
                    return False
                continue
            if self.pure_literals and self._assign_pure():
                continue
            v = self._pick(order)
            if v == 0:
                return True
            self._decide(-v)

    def add_blocking_clause(self, lits: Sequence[int]) -> None:
        """Add a clause that the current assignment satisfies.

        Watches go to a true literal and a false one. Every false literal is
        already on the trail at or below the current level, so it stays false
        and the clause is never visited while its decision level lives. It is
        retired when that level is backtracked over: chronological search
        never re-enters the region the clause excludes.
        """
        true_lit = next((lit for lit in lits if self.val(lit) == 1), None)
        if true_lit is None:
            raise ValueError("blocking clause must be satisfied when added")
        false_lit = next((lit for lit in lits if self.val(lit) == -1), None)
        head = [true_lit] if false_lit is None else [true_lit, false_lit]
        c = head + [lit for lit in dict.fromkeys(lits) if lit not in head]
        ci = self._attach(c)
        self.level_clauses.setdefault(self.level, []).append(ci)

    def full_values(self) -> tuple[bool, ...]:
        return (False,) + tuple(self.value[v] == 1 for v in range(1, self.n + 1))


def _solver_for(c: CnfInstance, pure_literals: bool) -> DpllSolver:
    return DpllSolver(c.num_vars, c.clauses, pure_literals=pure_literals)


def solve(c: CnfInstance, assumptions: Optional[Sequence[int]] = None) -> SatOutcome:
    solver = _solver_for(c, pure_literals=True)
    for lit in assumptions or ():
        solver.enqueue_root(lit)
    if not solver.search():
        return Unsat()
    values = solver.full_values()
    return Sat({name: values[v] for name, v in c.var_map.items()}, values)


def check_model(c: CnfInstance, values: Sequence[bool]) -> bool:
    """Post-hoc check that a full variable assignment satisfies every clause."""
    return all(any(values[abs(lit)] == (lit > 0) for lit in clause) for clause in c.clauses)


@dataclass
class Models:
    models: list[dict[str, bool]]
    limit_exceeded: bool = False

    def __iter__(self) -> Iterator[dict[str, bool]]:
        return iter(self.models)

    def __len__(self) -> int:
        return len(self.models)

    def __getitem__(self, i: int) -> dict[str, bool]:
        return self.models[i]


def enumerate_cnf(c: CnfInstance, project: Sequence[str], limit: int) -> Models:
    """Models of ``c`` projected onto ``project``, without duplicates.

    Projected variables are decided before all others. After each model a
    blocking clause over the projected variables is added and the search
    resumes from the latest projected decision, so each projected assignment
    is reported once.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    proj_vars = [c.var_map[s] for s in project]
    keep = set(proj_vars)
    solver = _solver_for(c, pure_literals=False)  # pure literals would drop models
    order = [v for v in solver.order if v in keep] + [v for v in solver.order if v not in keep]
    found: list[dict[str, bool]] = []
    while solver.search(order):
        if len(found) == limit:
            return Models(found, limit_exceeded=True)
        found.append({s: solver.value[v] == 1 for s, v in zip(project, proj_vars)})
        block = [-v if solver.value[v] == 1 else v for v in proj_vars]
        if not block or not solver.backtrack(keep):
            break
        solver.add_blocking_clause(block)
    return Models(found)


def enumerate_models(
    f: Formula, vocab: Union[Vocabulary, Sequence[str]], limit: int = 1000
) -> Models:
    """Distinct models of ``f`` over ``vocab``.

    Symbols of ``f`` outside ``vocab`` are existentially projected away, like
    the Tseitin auxiliaries.
    """
    ids = list(vocab.ids if isinstance(vocab, Vocabulary) else vocab)
    return enumerate_cnf(to_cnf(f, ids), ids, limit)


def to_dimacs(c: CnfInstance, comments: Sequence[str] = ()) -> str:
    lines = [f"c {line}" for line in comments]
    lines += [f"c var {v} {name}" for name, v in c.var_map.items()]
    lines.append(f"p cnf {c.num_vars} {len(c.clauses)}")
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in c.clauses]
    return "\n".join(lines) + "\n"
