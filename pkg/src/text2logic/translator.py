"""LLM front end: prompts, chat-completion calls, and formula extraction.

The model only translates. Two protocols are supported: the whole puzzle in
one request (``WHOLE_TEXT``) or one fresh request per statement
(``STATEMENT_AT_A_TIME``). Every response is turned into exactly one
``CandidateEncoding`` per statement, either a vocabulary-valid formula or a
classified failure.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import re
import string
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Protocol, Sequence, Union

import httpx

from .corpus import Puzzle, Statement
from .logic import Formula, Vocabulary, free_symbols
from .parser import OPERATOR_HINT_RE, ParseError, ParseErrorKind, parse, to_text

log = logging.getLogger(__name__)

Messages = list[dict[str, str]]


class TranslationMode(enum.Enum):
    WHOLE_TEXT = "whole"
    STATEMENT_AT_A_TIME = "stepwise"


class FailureKind(enum.Enum):
    PARSE_ERROR = "ParseError"
    OUT_OF_VOCABULARY = "OutOfVocabulary"
    NO_FORMULA_FOUND = "NoFormulaFound"
    REFUSAL = "Refusal"
    TRANSPORT_ERROR = "TransportError"
    AUTH_ERROR = "AuthError"
    TIMEOUT = "TimeoutError"


class TranslatorError(Exception):
    kind = FailureKind.TRANSPORT_ERROR


class TransportError(TranslatorError):
    kind = FailureKind.TRANSPORT_ERROR


class AuthError(TranslatorError):
    kind = FailureKind.AUTH_ERROR


class RequestTimeout(TranslatorError, TimeoutError):
    kind = FailureKind.TIMEOUT


class StatementNotInPuzzle(KeyError):
    pass


# -- configuration ------------------------------------------------------------


@dataclass(frozen=True)
class TranslatorConfig:
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4"
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 0.0
    max_retries: int = 2
    timeout: float = 60.0
    parallelism: int = 4
    backoff: float = 1.0
    carry_history: bool = False
    prompt_template: Optional[str] = None

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be in [0, 2]")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "TranslatorConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if "api_key" in data:
            raise ValueError("API keys are read from the environment only; set api_key_env")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)


# -- records ------------------------------------------------------------------


@dataclass(frozen=True)
class ExtractionError:
    kind: FailureKind
    detail: str = ""


@dataclass(frozen=True)
class CandidateEncoding:
    statement_id: str
    excerpt: str
    formula: Optional[Formula] = None
    error: Optional[ExtractionError] = None

    def __post_init__(self) -> None:
        if (self.formula is None) == (self.error is None):
            raise ValueError("exactly one of formula / error must be set")

    def to_dict(self) -> dict[str, Any]:
        return {
            "statement_id": self.statement_id,
            "excerpt": self.excerpt,
            "formula": to_text(self.formula) if self.formula is not None else None,
            "error": {"kind": self.error.kind.value, "detail": self.error.detail} if self.error else None,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any], vocab: Optional[Vocabulary] = None) -> "CandidateEncoding":
        err = d.get("error")
        if d.get("formula") is not None:
            try:
                formula = parse(d["formula"], vocab)
            except ParseError as e:
                kind = (
                    FailureKind.OUT_OF_VOCABULARY
                    if e.kind is ParseErrorKind.UNKNOWN_SYMBOL
                    else FailureKind.PARSE_ERROR
                )
                return cls(d["statement_id"], d.get("excerpt", ""), error=ExtractionError(kind, str(e)))
            return cls(d["statement_id"], d.get("excerpt", ""), formula=formula)
        if not err:
            raise ValueError(f"candidate {d.get('statement_id')!r} has neither formula nor error")
        return cls(
            d["statement_id"],
            d.get("excerpt", ""),
            error=ExtractionError(FailureKind(err["kind"]), err.get("detail", "")),
        )


def failed(statement_id: str, kind: FailureKind, detail: str = "", excerpt: str = "") -> CandidateEncoding:
    return CandidateEncoding(statement_id, excerpt, error=ExtractionError(kind, detail))


@dataclass(frozen=True)
class TranscriptRecord:
    timestamp: str
    mode: str
    prompt: str
    response: str
    model: str
    statement_id: Optional[str] = None
    error: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "TranscriptRecord":
        return cls(**json.loads(line))


class TranscriptSink:
    """Append-only JSON-lines transcript; writes are serialised."""

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path) if path else None
        self.records: list[TranscriptRecord] = []
        self._lock = threading.Lock()
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: TranscriptRecord) -> None:
        with self._lock:
            self.records.append(record)
            if self.path:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(record.to_json() + "\n")


def read_transcripts(path: Union[str, Path]) -> list[TranscriptRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [TranscriptRecord.from_json(line) for line in lines if line.strip()]


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def make_run_dir(root: Union[str, Path], now: Optional[datetime] = None) -> Path:
    """Create a fresh timestamped run directory; never reuses an existing one."""
    stamp = (now or datetime.now(timezone.utc)).strftime("%Y%m%dT%H%M%SZ")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    for n in range(1000):
        candidate = root / (stamp if n == 0 else f"{stamp}-{n}")
        try:
            candidate.mkdir()
            return candidate
        except FileExistsError:
            continue
    raise RuntimeError(f"could not create a run directory under {root}")


# -- prompts ------------------------------------------------------------------

DEFAULT_TEMPLATE = """\
Task: Given the following propositional symbols:
$symbols

express $task in propositional logic, using only the symbols above and the \
connectives NOT, AND, OR, XOR, -> and <->. Encode exactly what is stated; \
do not add assumptions or decide the truth of any statement.

$body

$format"""


def render_symbols(vocab: Vocabulary) -> str:
    return "\n".join(f"{s.id} - {s.gloss}" if s.gloss else s.id for s in vocab)


def build_prompt(
    p: Puzzle,
    mode: TranslationMode,
    s: Optional[Statement] = None,
    template: Optional[str] = None,
) -> str:
    if mode is TranslationMode.STATEMENT_AT_A_TIME:
        if s is None or s not in p.statements:
            raise StatementNotInPuzzle(getattr(s, "id", None))
        task = "the following statement"
        body = f"{s.id}. {s.text}"
        fmt = f"Answer with a single line of the form: {s.id}. <formula>"
    else:
        task = "each of the following statements"
        listing = "\n".join(f"{st.id}. {st.text}" for st in p.statements)
        body = f"{p.narrative}\n\nStatements:\n{listing}"
        fmt = "Answer with one line per statement, each of the form: <statement id>. <formula>"
    return string.Template(template or DEFAULT_TEMPLATE).substitute(
        symbols=render_symbols(p.vocab), task=task, body=body, format=fmt
    )


def direct_qa_prompt(p: Puzzle) -> str:
    questions = "\n".join(q.question for q in p.queries)
    return f"{p.narrative}\n\n{questions}" if questions else p.narrative


# -- extraction ---------------------------------------------------------------

_MARKER_RE = re.compile(
    r"""^\s*(?:[-*•]\s+)?(?:\*\*)?(?:(?:statement|sentence)\s*)?
        (?:\((?P<a>[A-Za-z0-9_]+)\)|(?P<b>[A-Za-z0-9_]+)\s*(?:\*\*)?\s*[.):–-](?!>))
        \s*(?:\*\*)?""",
    re.IGNORECASE | re.VERBOSE,
)
_REFUSAL_RE = re.compile(
    r"\b(?:assum\w*|cannot|can't|can not|unable|refus\w*|not possible|impossible|won't)\b",
    re.IGNORECASE,
)
_BACKTICKS_RE = re.compile(r"`+([^`]+)`+")


def _clean(line: str) -> str:
    s = line.replace("**", "").replace("$", " ").strip()
    s = re.sub(r"^(?:[-*•]\s+)", "", s)
    return s.strip().rstrip(".,;").strip()


def _bearing(text: str, vocab: Vocabulary) -> Optional[Formula]:
    """Parse ``text`` as a formula-like span (ignoring the vocabulary)."""
    try:
        f = parse(text)
    except ParseError:
        return None
    if OPERATOR_HINT_RE.search(text) or "NOT" in text or "~" in text or "!" in text:
        return f
    # a bare word only counts when it is a declared symbol or a constant
    syms = free_symbols(f)
    if all(sym in vocab for sym in syms):
        return f
    return None


def _best_span(line: str, vocab: Vocabulary) -> Optional[str]:
    s = _clean(line)
    if not s:
        return None
    tries = [s]
    tries += [_clean(m) for m in _BACKTICKS_RE.findall(line)]
    if ":" in s:
        tries.append(_clean(s.rsplit(":", 1)[1]))
    words = [m.start() for m in re.finditer(r"\S+", s)]
    tries += [s[i:] for i in words[1:]]  # suffixes, longest first
    # a prefix only counts when the dropped tail is plain prose
    tries += [
        s[: m.start()].strip()
        for m in reversed(list(re.finditer(r"[,;]|\s+(?=\S)", s)))
        if not OPERATOR_HINT_RE.search(s[m.start():])
    ]
    for t in tries:
        if t and _bearing(t, vocab) is not None:
            return t
    return None


@dataclass
class _Block:
    lines: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "\n".join(self.lines).strip()


def _split_blocks(response: str, ids: Sequence[str]) -> dict[str, _Block]:
    wanted = set(ids)
    blocks: dict[str, _Block] = {}
    current: Optional[_Block] = None
    for line in response.splitlines():
        m = _MARKER_RE.match(line)
        sid = (m.group("a") or m.group("b")) if m else None
        if sid in wanted:
            current = blocks.setdefault(sid, _Block())
            current.lines.append(line[m.end():])
        elif current is not None:
            current.lines.append(line)
    return blocks


def _from_text(statement_id: str, text: str, vocab: Vocabulary) -> CandidateEncoding:
    valid: Optional[tuple[str, Formula]] = None
    oov: Optional[tuple[str, ParseError]] = None
    syntax: Optional[tuple[str, ParseError]] = None
    for line in text.splitlines():
        span = _best_span(line, vocab)
        if span is not None:
            try:
                valid = (span, parse(span, vocab))
            except ParseError as e:
                oov = (span, e)
        elif OPERATOR_HINT_RE.search(line):
            try:
                parse(_clean(line))
            except ParseError as e:
                syntax = (_clean(line), e)
    if valid:
        return CandidateEncoding(statement_id, valid[0], formula=valid[1])
    if oov:
        return failed(statement_id, FailureKind.OUT_OF_VOCABULARY, oov[1].detail, oov[0])
    if syntax:
        return failed(statement_id, FailureKind.PARSE_ERROR, str(syntax[1]), syntax[0])
    if _REFUSAL_RE.search(text):
        return failed(statement_id, FailureKind.REFUSAL, "response declines or assumes instead of encoding", text)
    return failed(statement_id, FailureKind.NO_FORMULA_FOUND, "no formula in response", text)


def extract_candidates(
    response: str,
    p: Puzzle,
    mode: TranslationMode,
    statements: Optional[Sequence[Statement]] = None,
) -> list[CandidateEncoding]:
    """One candidate per statement, last parseable formula wins.

    Text is attributed to statements by id markers ("3.", "(3)", "Statement
    3:"). Without markers, a single-statement request takes the whole
    response, and otherwise the k-th formula-bearing line goes to the k-th
    statement.
    """
    stmts = list(statements) if statements is not None else list(p.statements)
    ids = [s.id for s in stmts]
    blocks = _split_blocks(response, ids)
    if blocks:
        return [
            _from_text(sid, blocks[sid].text, p.vocab)
            if sid in blocks
            else failed(sid, FailureKind.NO_FORMULA_FOUND, "no answer marked with this statement id")
            for sid in ids
        ]
    if len(stmts) == 1:
        return [_from_text(ids[0], response, p.vocab)]
    lines = [ln for ln in response.splitlines() if _best_span(ln, p.vocab) is not None]
    out = []
    for k, sid in enumerate(ids):
        if k < len(lines):
            out.append(_from_text(sid, lines[k], p.vocab))
        else:
            out.append(failed(sid, FailureKind.NO_FORMULA_FOUND, "fewer formula lines than statements"))
    return out


# -- clients ------------------------------------------------------------------


class Translator(Protocol):
    def complete(self, messages: Messages) -> str: ...


class ChatClient:
    """Chat-completion client: POST {model, temperature, messages}; reads
    ``choices[0].message.content``. Retries transport failures, 429 and 5xx."""

    RETRY_STATUS = frozenset({408, 429, 500, 502, 503, 504})

    def __init__(
        self,
        cfg: TranslatorConfig,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        key = os.environ.get(cfg.api_key_env)
        if not key:
            raise AuthError(f"environment variable {cfg.api_key_env} is not set")
        self.cfg = cfg
        self._sleep = sleep
        self._http = httpx.Client(timeout=cfg.timeout, transport=transport)
        self._headers = {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}
        self.attempts = 0
        self._lock = threading.Lock()

    def close(self) -> None:
        self._http.close()

    def complete(self, messages: Messages) -> str:
        payload = {"model": self.cfg.model, "temperature": self.cfg.temperature, "messages": messages}
        last: TranslatorError = TransportError("no attempt made")
        tries = self.cfg.max_retries + 1
        for attempt in range(tries):
            with self._lock:
                self.attempts += 1
            try:
                r = self._http.post(self.cfg.endpoint, json=payload, headers=self._headers)
            except httpx.TimeoutException as e:
                last = RequestTimeout(f"timed out after {self.cfg.timeout}s: {e}")
            except httpx.TransportError as e:
                last = TransportError(f"{type(e).__name__}: {e}")
            else:
                if r.status_code in (401, 403):
                    raise AuthError(f"HTTP {r.status_code} from {self.cfg.endpoint}")
                if r.status_code in self.RETRY_STATUS:
                    last = TransportError(f"HTTP {r.status_code}")
                elif r.status_code >= 400:
                    raise TransportError(f"HTTP {r.status_code}: {r.text[:200]}")
                else:
                    try:
                        return r.json()["choices"][0]["message"]["content"]
                    except (ValueError, KeyError, IndexError, TypeError) as e:
                        raise TransportError(f"malformed completion response: {e!r}") from e
            if attempt + 1 < tries:
                log.info("request failed (%s), retry %d/%d", last, attempt + 1, self.cfg.max_retries)
                self._sleep(self.cfg.backoff * 2**attempt)
        raise last


class MockTranslator:
    """Offline stand-in that answers known prompts from a script.

    Replies are keyed by the exact prompt text, so prompts are built by the
    same code path as live runs. Unknown prompts get ``default``.
    """

    def __init__(self, replies: Mapping[str, str], default: str = ""):
        self.replies = dict(replies)
        self.default = default
        self.calls: list[Messages] = []
        self._lock = threading.Lock()

    def complete(self, messages: Messages) -> str:
        with self._lock:
            self.calls.append([dict(m) for m in messages])
        return self.replies.get(messages[-1]["content"], self.default)

    @classmethod
    def scripted(
        cls,
        p: Puzzle,
        answers: Mapping[str, str],
        whole_text: Optional[str] = None,
        direct_answer: str = "",
        template: Optional[str] = None,
    ) -> "MockTranslator":
        """Answer statement ``id`` with ``answers[id]``; missing ids get an empty reply."""
        replies = {}
        whole = build_prompt(p, TranslationMode.WHOLE_TEXT, template=template)
        replies[whole] = (
            whole_text
            if whole_text is not None
            else "\n".join(f"{sid}. {answers[sid]}" for sid in p.statement_ids if sid in answers)
        )
        for s in p.statements:
            prompt = build_prompt(p, TranslationMode.STATEMENT_AT_A_TIME, s, template)
            replies[prompt] = f"{s.id}. {answers[s.id]}" if s.id in answers else ""
        replies[direct_qa_prompt(p)] = direct_answer
        return cls(replies)

    @classmethod
    def gold(cls, p: Puzzle, template: Optional[str] = None) -> "MockTranslator":
        return cls.scripted(p, {s.id: to_text(s.gold) for s in p.statements}, template=template)

    @classmethod
    def from_file(cls, path: Union[str, Path], p: Puzzle, template: Optional[str] = None) -> "MockTranslator":
        """Script file: ``{"responses": {id: text}, "whole_text": ..., "direct_qa": ...}``."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        responses = data.get("responses", {})
        unknown = sorted(set(responses) - set(p.statement_ids))
        if unknown:
            raise ValueError(f"mock script answers unknown statement ids: {', '.join(unknown)}")
        return cls.scripted(
            p,
            responses,
            whole_text=data.get("whole_text"),
            direct_answer=data.get("direct_qa", ""),
            template=template,
        )


# -- running ------------------------------------------------------------------


@dataclass
class Translation:
    candidates: list[CandidateEncoding]
    transcripts: list[TranscriptRecord]


def _call(client: Translator, messages: Messages) -> tuple[str, Optional[TranslatorError]]:
    try:
        return client.complete(messages), None
    except TranslatorError as e:
        return "", e


def translate(
    p: Puzzle,
    mode: TranslationMode,
    cfg: TranslatorConfig,
    client: Translator,
    sink: Optional[TranscriptSink] = None,
    clock: Callable[[], str] = utc_now,
) -> Translation:
    sink = sink or TranscriptSink()

    def record(prompt: str, response: str, err: Optional[TranslatorError], sid: Optional[str]) -> TranscriptRecord:
        rec = TranscriptRecord(clock(), mode.value, prompt, response, cfg.model, sid, str(err) if err else None)
        sink.append(rec)
        return rec

    if mode is TranslationMode.WHOLE_TEXT:
        prompt = build_prompt(p, mode, template=cfg.prompt_template)
        response, err = _call(client, [{"role": "user", "content": prompt}])
        rec = record(prompt, response, err, None)
        if err:
            candidates = [failed(s.id, err.kind, str(err)) for s in p.statements]
        else:
            candidates = extract_candidates(response, p, mode)
        return Translation(candidates, [rec])

    def one(s: Statement, history: Messages) -> tuple[CandidateEncoding, TranscriptRecord, Messages]:
        prompt = build_prompt(p, mode, s, cfg.prompt_template)
        messages = history + [{"role": "user", "content": prompt}]
        response, err = _call(client, messages)
        rec = record(prompt, response, err, s.id)
        if err:
            cand = failed(s.id, err.kind, str(err))
        else:
            cand = extract_candidates(response, p, mode, [s])[0]
        return cand, rec, messages + [{"role": "assistant", "content": response}]

    results: dict[str, tuple[CandidateEncoding, TranscriptRecord]] = {}
    if cfg.carry_history:
        history: Messages = []
        for s in p.statements:
            cand, rec, history = one(s, history)
            results[s.id] = (cand, rec)
    else:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            futures = {s.id: pool.submit(one, s, []) for s in p.statements}
            for sid, fut in futures.items():
                cand, rec, _ = fut.result()
                results[sid] = (cand, rec)
    ordered = [results[s.id] for s in p.statements]
    return Translation([c for c, _ in ordered], [r for _, r in ordered])


def candidates_from_transcripts(
    records: Sequence[TranscriptRecord], p: Puzzle
) -> list[CandidateEncoding]:
    """Re-run extraction over persisted transcripts (no model calls)."""
    by_id = {r.statement_id: r for r in records if r.statement_id is not None}
    whole = [r for r in records if r.mode == TranslationMode.WHOLE_TEXT.value]
    if whole:
        r = whole[-1]
        if r.error:
            return [failed(s.id, FailureKind.TRANSPORT_ERROR, r.error) for s in p.statements]
        return extract_candidates(r.response, p, TranslationMode.WHOLE_TEXT)
    out = []
    for s in p.statements:
        r = by_id.get(s.id)
        if r is None:
            out.append(failed(s.id, FailureKind.NO_FORMULA_FOUND, "no transcript for statement"))
        elif r.error:
            out.append(failed(s.id, FailureKind.TRANSPORT_ERROR, r.error))
        else:
            out.append(extract_candidates(r.response, p, TranslationMode.STATEMENT_AT_A_TIME, [s])[0])
    return out


def direct_qa(
    p: Puzzle,
    cfg: TranslatorConfig,
    client: Translator,
    sink: Optional[TranscriptSink] = None,
    clock: Callable[[], str] = utc_now,
) -> TranscriptRecord:
    """Ask the model the puzzle outright; the answer is kept for human grading."""
    prompt = direct_qa_prompt(p)
    response, err = _call(client, [{"role": "user", "content": prompt}])
    rec = TranscriptRecord(clock(), "direct-qa", prompt, response, cfg.model, None, str(err) if err else None)
    (sink or TranscriptSink()).append(rec)
    return rec


def write_candidates(
    path: Union[str, Path], p: Puzzle, mode: TranslationMode, candidates: Sequence[CandidateEncoding]
) -> None:
    data = {"puzzle": p.name, "mode": mode.value, "candidates": [c.to_dict() for c in candidates]}
    Path(path).write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def read_candidates(path: Union[str, Path], p: Puzzle) -> tuple[Optional[TranslationMode], list[CandidateEncoding]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    mode = TranslationMode(data["mode"]) if data.get("mode") else None
    return mode, [CandidateEncoding.from_dict(d, p.vocab) for d in data["candidates"]]
