"""Puzzle files: loading, validation and the bundled corpus.

A puzzle file is JSON validated against ``schemas/puzzle.schema.json``; every
formula string is parsed against the puzzle's own symbol list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import jsonschema

from .logic import DuplicateAtom, Formula, Symbol, Vocabulary, free_symbols
from .parser import ParseError, ParseErrorKind, parse, to_text
from .reasoner import KnowledgeBase, QueryStatus, classify, satisfiable

PathLike = Union[str, Path]


class CorpusError(Exception):
    pass


class SchemaError(CorpusError):
    def __init__(self, field: str, message: str, position: Optional[tuple[int, int]] = None):
        where = f" (line {position[0]}, column {position[1]})" if position else ""
        super().__init__(f"{field}: {message}{where}")
        self.field = field
        self.message = message
        self.position = position


class VocabViolation(CorpusError):
    def __init__(self, where: str, symbol: str):
        super().__init__(f"{where}: symbol {symbol!r} is not declared")
        self.where = where
        self.symbol = symbol


class FormulaError(CorpusError):
    """A formula string in a puzzle file failed to parse."""

    def __init__(self, where: str, error: ParseError):
        super().__init__(f"{where}: {error}")
        self.where = where
        self.error = error


@dataclass(frozen=True)
class Statement:
    id: str
    text: str
    gold: Formula
    disputed: bool = False


@dataclass(frozen=True)
class Query:
    question: str
    target: Formula
    expected: QueryStatus


@dataclass(frozen=True)
class Puzzle:
    name: str
    narrative: str
    vocab: Vocabulary
    statements: tuple[Statement, ...]
    queries: tuple[Query, ...] = ()
    notes: tuple[str, ...] = ()
    independent: bool = False
    fixtures: Mapping[str, Formula] = field(default_factory=dict)

    def statement(self, statement_id: str) -> Statement:
        for s in self.statements:
            if s.id == statement_id:
                return s
        raise KeyError(statement_id)

    @property
    def statement_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.statements)

    def gold_kb(self) -> KnowledgeBase:
        return KnowledgeBase(self.vocab, tuple((s.id, s.gold) for s in self.statements))

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "name": self.name,
            "narrative": self.narrative,
            "symbols": [
                {"id": s.id, "gloss": s.gloss} if s.gloss else {"id": s.id} for s in self.vocab
            ],
            "statements": [
                {"id": s.id, "text": s.text, "gold": to_text(s.gold), **({"disputed": True} if s.disputed else {})}
                for s in self.statements
            ],
            "queries": [
                {"question": q.question, "target": to_text(q.target), "expected": q.expected.value}
                for q in self.queries
            ],
        }
        if self.independent:
            d["independent"] = True
        if self.fixtures:
            d["fixtures"] = {k: to_text(v) for k, v in self.fixtures.items()}
        if self.notes:
            d["notes"] = list(self.notes)
        return d


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


def _schema() -> dict:
    text = resources.files(__package__).joinpath("schemas/puzzle.schema.json").read_text("utf-8")
    return json.loads(text)


def _parse_in(text: str, vocab: Vocabulary, where: str) -> Formula:
    try:
        return parse(text, vocab)
    except ParseError as e:
        if e.kind is ParseErrorKind.UNKNOWN_SYMBOL:
            raise VocabViolation(where, e.offending or "?") from e
        raise FormulaError(where, e) from e


def puzzle_from_dict(data: Any) -> Puzzle:
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(path, err.message)
    try:
        vocab = Vocabulary(tuple(Symbol(s["id"], s.get("gloss", "")) for s in data["symbols"]))
    except (DuplicateAtom, ValueError) as e:
        raise SchemaError("symbols", str(e)) from e
    statements = tuple(
        Statement(
            s["id"],
            s["text"],
            _parse_in(s["gold"], vocab, f"statement {s['id']}"),
            s.get("disputed", False),
        )
        for s in data["statements"]
    )
    queries = tuple(
        Query(q["question"], _parse_in(q["target"], vocab, f"query {i}"), QueryStatus(q["expected"]))
        for i, q in enumerate(data["queries"])
    )
    fixtures = {
        name: _parse_in(text, vocab, f"fixture {name}")
        for name, text in data.get("fixtures", {}).items()
    }
    return Puzzle(
        name=data["name"],
        narrative=data["narrative"],
        vocab=vocab,
        statements=statements,
        queries=queries,
        notes=tuple(data.get("notes", ())),
        independent=data.get("independent", False),
        fixtures=fixtures,
    )


def load_puzzle(path: PathLike) -> Puzzle:
    """Load and parse a puzzle file; ``OSError`` propagates for I/O failures."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("<json>", e.msg, (e.lineno, e.colno)) from e
    return puzzle_from_dict(data)


def validate_puzzle(p: Puzzle) -> list[Violation]:
    violations: list[Violation] = []
    ids = [s.id for s in p.statements]
    for sid in sorted({i for i in ids if ids.count(i) > 1}):
        violations.append(Violation("DuplicateStatementId", f"statement id {sid!r} is not unique"))
    formulas = [(f"statement {s.id}", s.gold) for s in p.statements]
    formulas += [(f"query {i}", q.target) for i, q in enumerate(p.queries)]
    formulas += [(f"fixture {k}", f) for k, f in p.fixtures.items()]
    for where, f in formulas:
        for sym in free_symbols(f):
            if sym not in p.vocab:
                violations.append(Violation("VocabViolation", f"{where} uses undeclared {sym!r}"))
    if any(v.kind == "VocabViolation" for v in violations):
        return violations

    if p.independent:
        for s in p.statements:
            if not satisfiable(s.gold):
                violations.append(Violation("UnsatisfiableStatement", f"gold of statement {s.id} is unsatisfiable"))
        if p.queries:
            violations.append(Violation("QueriesOnIndependentPuzzle", "independent statements admit no queries"))
        return violations

    kb = KnowledgeBase.from_formulas(p.vocab, (s.gold for s in p.statements))
    if not satisfiable(kb.formula()):
        violations.append(Violation("InconsistentGoldKb", "the conjunction of gold encodings is unsatisfiable"))
        return violations
    for i, q in enumerate(p.queries):
        got = classify(kb, q.target)
        if got is not q.expected:
            violations.append(
                Violation(
                    "ExpectationMismatch",
                    f"query {i} ({to_text(q.target)}): expected {q.expected.value}, gold KB gives {got.value}",
                )
            )
    return violations


def corpus_dir() -> Path:
    return Path(str(resources.files(__package__).joinpath("corpus")))


def bundled() -> list[Puzzle]:
    return [load_puzzle(path) for path in sorted(corpus_dir().glob("*.json"))]


def find_puzzle(ref: PathLike, directory: Optional[PathLike] = None) -> Path:
    """Resolve a puzzle reference: a file path, a corpus name, or a unique name suffix."""
    path = Path(ref)
    if path.suffix == ".json" and path.is_file():
        return path
    base = Path(directory) if directory else corpus_dir()
    name = path.stem if path.suffix == ".json" else str(ref)
    exact = base / f"{name}.json"
    if exact.is_file():
        return exact
    matches = sorted(p for p in base.glob("*.json") if p.stem.endswith(name))
    if len(matches) == 1:
        return matches[0]
    if not matches:
        raise FileNotFoundError(f"no puzzle {str(ref)!r} in {base}")
    raise FileNotFoundError(f"ambiguous puzzle {str(ref)!r}: {', '.join(p.stem for p in matches)}")
