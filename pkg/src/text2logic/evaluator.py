"""Scoring candidate encodings and running the translate-then-prove pipeline."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .corpus import Puzzle, Statement
from .logic import conj
from .reasoner import (
    EncodingRelation,
    KnowledgeBase,
    QueryStatus,
    classify,
    relation,
    satisfiable,
)
from .translator import (
    CandidateEncoding,
    FailureKind,
    TranscriptSink,
    TranslationMode,
    Translator,
    TranslatorConfig,
    translate,
)

REPORT_SCHEMA_VERSION = 1


class IdMismatch(ValueError):
    pass


class CardinalityMismatch(ValueError):
    pass


@dataclass(frozen=True)
class StatementScore:
    statement_id: str
    relation: Union[EncodingRelation, FailureKind]
    disputed: bool = False

    @property
    def correct(self) -> bool:
        return self.relation is EncodingRelation.EQUIVALENT

    def to_dict(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "relation": self.relation.value,
            "correct": self.correct,
            "disputed": self.disputed,
        }


@dataclass(frozen=True)
class PuzzleScore:
    puzzle: str
    mode: str
    scores: tuple[StatementScore, ...]

    @property
    def ratio(self) -> tuple[int, int]:
        """Correct over total, disputed statements left out."""
        counted = [s for s in self.scores if not s.disputed]
        return sum(s.correct for s in counted), len(counted)

    @property
    def disputed_ratio(self) -> tuple[int, int]:
        held = [s for s in self.scores if s.disputed]
        return sum(s.correct for s in held), len(held)

    def to_dict(self) -> dict:
        return {
            "kind": "score",
            "puzzle": self.puzzle,
            "mode": self.mode,
            "ratio": list(self.ratio),
            "disputed_ratio": list(self.disputed_ratio),
            "statements": [s.to_dict() for s in self.scores],
        }


class KbState(enum.Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    INCOMPLETE = "Incomplete"


@dataclass(frozen=True)
class KbStatus:
    state: KbState
    failed: tuple[str, ...] = ()

    def __str__(self) -> str:
        if self.state is KbState.INCOMPLETE:
            return f"Incomplete({', '.join(self.failed)})"
        return self.state.value


class Verdict(enum.Enum):
    ALL_CORRECT = "AllCorrect"
    PARTIALLY_CORRECT = "PartiallyCorrect"
    FAILED = "Failed"


@dataclass(frozen=True)
class QueryOutcome:
    question: str
    expected: QueryStatus
    obtained: QueryStatus

    @property
    def match(self) -> bool:
        return self.expected is self.obtained


@dataclass(frozen=True)
class EndToEndReport:
    puzzle: str
    mode: str
    kb_status: KbStatus
    queries: tuple[QueryOutcome, ...] = ()

    @property
    def verdict(self) -> Verdict:
        if self.kb_status.state is not KbState.CONSISTENT:
            return Verdict.FAILED
        if all(q.match for q in self.queries):
            return Verdict.ALL_CORRECT
        if any(q.match for q in self.queries):
            return Verdict.PARTIALLY_CORRECT
        return Verdict.FAILED

    def to_dict(self) -> dict:
        return {
            "kind": "end_to_end",
            "puzzle": self.puzzle,
            "mode": self.mode,
            "kb_status": self.kb_status.state.value,
            "failed_statements": list(self.kb_status.failed),
            "queries": [
                {
                    "question": q.question,
                    "expected": q.expected.value,
                    "obtained": q.obtained.value,
                    "match": q.match,
                }
                for q in self.queries
            ],
            "verdict": self.verdict.value,
        }


@dataclass(frozen=True)
class Assessment:
    score: PuzzleScore
    report: EndToEndReport
    candidates: tuple[CandidateEncoding, ...] = field(default=())


def score_statement(c: CandidateEncoding, s: Statement) -> StatementScore:
    if c.statement_id != s.id:
        raise IdMismatch(f"candidate for {c.statement_id!r} scored against statement {s.id!r}")
    rel = relation(c.formula, s.gold) if c.formula is not None else c.error.kind
    return StatementScore(s.id, rel, s.disputed)


def _aligned(candidates: Sequence[CandidateEncoding], p: Puzzle) -> list[CandidateEncoding]:
    if len(candidates) != len(p.statements):
        raise CardinalityMismatch(
            f"{len(candidates)} candidates for {len(p.statements)} statements of {p.name}"
        )
    by_id = {c.statement_id: c for c in candidates}
    missing = [s.id for s in p.statements if s.id not in by_id]
    if missing or len(by_id) != len(candidates):
        raise CardinalityMismatch(f"candidate ids do not match statement ids (missing: {missing})")
    return [by_id[s.id] for s in p.statements]


def score_puzzle(candidates: Sequence[CandidateEncoding], p: Puzzle, mode: TranslationMode) -> PuzzleScore:
    ordered = _aligned(candidates, p)
    return PuzzleScore(p.name, mode.value, tuple(score_statement(c, s) for c, s in zip(ordered, p.statements)))


def assemble(candidates: Sequence[CandidateEncoding], p: Puzzle, mode: TranslationMode) -> EndToEndReport:
    """Build a KB from candidate formulas and answer the puzzle's queries.

    Independent puzzles have no joint KB; each candidate must be satisfiable
    on its own.
    """
    ordered = _aligned(candidates, p)
    failed = tuple(c.statement_id for c in ordered if c.formula is None)
    if failed:
        return EndToEndReport(p.name, mode.value, KbStatus(KbState.INCOMPLETE, failed))
    if p.independent:
        ok = all(satisfiable(c.formula) for c in ordered)
        return EndToEndReport(p.name, mode.value, KbStatus(KbState.CONSISTENT if ok else KbState.INCONSISTENT))
    kb = KnowledgeBase(p.vocab, tuple((c.statement_id, c.formula) for c in ordered))
    if not satisfiable(conj(f for _, f in kb.facts)):
        return EndToEndReport(p.name, mode.value, KbStatus(KbState.INCONSISTENT))
    outcomes = tuple(QueryOutcome(q.question, q.expected, classify(kb, q.target)) for q in p.queries)
    return EndToEndReport(p.name, mode.value, KbStatus(KbState.CONSISTENT), outcomes)


def assess(candidates: Sequence[CandidateEncoding], p: Puzzle, mode: TranslationMode) -> Assessment:
    return Assessment(score_puzzle(candidates, p, mode), assemble(candidates, p, mode), tuple(candidates))


def end_to_end(
    p: Puzzle,
    mode: TranslationMode,
    cfg: TranslatorConfig,
    client: Translator,
    sink: Optional[TranscriptSink] = None,
) -> EndToEndReport:
    return assemble(translate(p, mode, cfg, client, sink).candidates, p, mode)


# -- rendering ----------------------------------------------------------------

Report = Union[PuzzleScore, EndToEndReport]
_HEADER = ("puzzle", "mode", "ratio", "disputed", "kb", "queries", "verdict")


def _frac(r: tuple[int, int]) -> str:
    return f"{r[0]}/{r[1]}"


def _rows(reports: Sequence[Report]) -> list[tuple[str, ...]]:
    """One row per (puzzle, mode); a score and an end-to-end report for the same key share it."""
    merged: dict[tuple[str, str], dict[str, str]] = {}
    for r in reports:
        cells = merged.setdefault((r.puzzle, r.mode), {})
        if isinstance(r, PuzzleScore):
            cells["ratio"] = _frac(r.ratio)
            cells["disputed"] = _frac(r.disputed_ratio) if r.disputed_ratio[1] else "-"
        else:
            cells["kb"] = str(r.kb_status)
            matched = sum(q.match for q in r.queries)
            cells["queries"] = f"{matched}/{len(r.queries)}" if r.queries else "-"
            cells["verdict"] = r.verdict.value
    return [
        (puzzle, mode, *(cells.get(col, "-") for col in _HEADER[2:]))
        for (puzzle, mode), cells in merged.items()
    ]


def render_table(reports: Sequence[Report]) -> str:
    rows = [_HEADER] + _rows(reports)
    widths = [max(len(row[i]) for row in rows) for i in range(len(_HEADER))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_json(reports: Sequence[Report]) -> str:
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "reports": [r.to_dict() for r in reports]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_report(reports: Sequence[Report], fmt: str = "table") -> str:
    if fmt == "table":
        return render_table(reports)
    if fmt == "json":
        return render_json(reports)
    raise ValueError(f"unknown report format {fmt!r}")
