"""Question answering over a propositional knowledge base.

Every question reduces to satisfiability checks on ``to_cnf`` instances, each
solved by a private ``DpllSolver``; nothing here holds state between calls.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .logic import (
    Formula,
    Iff,
    LogicError,
    Not,
    Vocabulary,
    conj,
    free_symbols,
)
from .sat import solve, to_cnf


class UnknownSymbol(LogicError, ValueError):
    def __init__(self, symbols: Sequence[str], where: str = "query"):
        super().__init__(f"{where} uses undeclared symbol(s): {', '.join(symbols)}")
        self.symbols = tuple(symbols)


class InconsistentKb(LogicError):
    pass


class QueryStatus(enum.Enum):
    ENTAILED = "Entailed"
    REFUTED = "Refuted"
    UNKNOWN = "Unknown"
    KB_INCONSISTENT = "KbInconsistent"


class Backbone(enum.Enum):
    FORCED_TRUE = "ForcedTrue"
    FORCED_FALSE = "ForcedFalse"
    FREE = "Free"


class EncodingRelation(enum.Enum):
    EQUIVALENT = "Equivalent"
    CANDIDATE_STRONGER = "CandidateStronger"
    CANDIDATE_WEAKER = "CandidateWeaker"
    OVERLAPPING = "Overlapping"
    DISJOINT = "Disjoint"
    CANDIDATE_CONTRADICTORY = "CandidateContradictory"
    CANDIDATE_TAUTOLOGICAL = "CandidateTautological"


@dataclass(frozen=True)
class KnowledgeBase:
    vocab: Vocabulary
    facts: tuple[tuple[str, Formula], ...] = ()

    def __post_init__(self) -> None:
        facts = tuple((label, f) for label, f in self.facts)
        object.__setattr__(self, "facts", facts)
        labels = [label for label, _ in facts]
        if len(set(labels)) != len(labels):
            raise ValueError("fact labels must be unique")
        for label, f in facts:
            missing = [s for s in free_symbols(f) if s not in self.vocab]
            if missing:
                raise UnknownSymbol(missing, where=f"fact {label!r}")

    @classmethod
    def from_formulas(cls, vocab: Vocabulary, formulas: Iterable[Formula]) -> "KnowledgeBase":
        return cls(vocab, tuple((str(i), f) for i, f in enumerate(formulas, 1)))

    def formula(self) -> Formula:
        return conj(f for _, f in self.facts)

    def replace(self, label: str, f: Formula) -> "KnowledgeBase":
        if label not in dict(self.facts):
            raise KeyError(label)
        return KnowledgeBase(self.vocab, tuple((l, f if l == label else g) for l, g in self.facts))


def satisfiable(f: Formula) -> bool:
    return solve(to_cnf(f)).satisfiable


def _check_vocab(kb: KnowledgeBase, q: Formula) -> None:
    missing = [s for s in free_symbols(q) if s not in kb.vocab]
    if missing:
        raise UnknownSymbol(missing)


def consistent(kb: KnowledgeBase) -> bool:
    return satisfiable(kb.formula())


def entails(kb: KnowledgeBase, q: Formula) -> bool:
    """KB |= q, decided as unsatisfiability of KB AND NOT q."""
    _check_vocab(kb, q)
    return not satisfiable(conj([kb.formula(), Not(q)]))


def classify(kb: KnowledgeBase, q: Formula) -> QueryStatus:
    _check_vocab(kb, q)
    if not consistent(kb):
        return QueryStatus.KB_INCONSISTENT
    if entails(kb, q):
        return QueryStatus.ENTAILED
    if entails(kb, Not(q)):
        return QueryStatus.REFUTED
    return QueryStatus.UNKNOWN


def backbone(kb: KnowledgeBase) -> dict[str, Backbone]:
    """Forced/free status of every vocabulary symbol.

    Model-intersection refinement: start from one model's literals and, for
    each surviving candidate, look for a model that flips it; every such model
    also eliminates all other candidates it disagrees with.
    """
    cnf = to_cnf(kb.formula(), kb.vocab.ids)
    first = solve(cnf)
    if not first.satisfiable:
        raise InconsistentKb("backbone is undefined for an inconsistent KB")
    candidates = dict(first.model)
    for sym in kb.vocab.ids:
        if sym not in candidates:
            continue
        outcome = solve(cnf, [cnf.literal(sym, not candidates[sym])])
        if outcome.satisfiable:
            for other, value in outcome.model.items():
                if other in candidates and candidates[other] != value:
                    del candidates[other]
    return {
        sym: (
            Backbone.FREE
            if sym not in candidates
            else Backbone.FORCED_TRUE if candidates[sym] else Backbone.FORCED_FALSE
        )
        for sym in kb.vocab.ids
    }


def equivalent(f: Formula, g: Formula) -> bool:
    return not satisfiable(Not(Iff(f, g)))


def _implies(f: Formula, g: Formula) -> bool:
    return not satisfiable(conj([f, Not(g)]))


def relation(candidate: Formula, gold: Formula) -> EncodingRelation:
    """Semantic relation of a candidate encoding to the gold one.

    Cases are tested in a fixed order, so exactly one applies.
    """
    if not satisfiable(candidate):
        return EncodingRelation.CANDIDATE_CONTRADICTORY
    if not satisfiable(Not(candidate)) and satisfiable(Not(gold)):
        return EncodingRelation.CANDIDATE_TAUTOLOGICAL
    forward, backward = _implies(candidate, gold), _implies(gold, candidate)
    if forward and backward:
        return EncodingRelation.EQUIVALENT
    if forward:
        return EncodingRelation.CANDIDATE_STRONGER
    if backward:
        return EncodingRelation.CANDIDATE_WEAKER
    if not satisfiable(conj([candidate, gold])):
        return EncodingRelation.DISJOINT
    return EncodingRelation.OVERLAPPING


def backbone_table(report: Mapping[str, Backbone], vocab: Vocabulary) -> list[str]:
    width = max((len(s) for s in vocab.ids), default=0)
    rows = []
    for sym in vocab.ids:
        gloss = vocab.gloss(sym)
        row = f"{sym.ljust(width)}  {report[sym].value:<11}"
        rows.append(f"{row}  {gloss}".rstrip() if gloss else row.rstrip())
    return rows
