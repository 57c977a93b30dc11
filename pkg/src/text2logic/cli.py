"""Command-line interface.

Exit status: 0 success, 1 logical failure (inconsistent KB, violations,
verdict other than AllCorrect, failed requests), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .corpus import CorpusError, Puzzle, find_puzzle, load_puzzle, validate_puzzle
from .evaluator import Verdict, assess, render_report
from .logic import Atom, Not, conj
from .parser import to_text
from .reasoner import InconsistentKb, backbone, backbone_table, classify, consistent, satisfiable
from .sat import solve, to_cnf, to_dimacs
from .translator import (
    AuthError,
    ChatClient,
    MockTranslator,
    TranscriptSink,
    TranslationMode,
    Translator,
    TranslatorConfig,
    direct_qa,
    make_run_dir,
    read_candidates,
    translate,
    write_candidates,
)

log = logging.getLogger("text2logic")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class CliConfig:
    corpus: Optional[Path]
    runs: Path
    translator: TranslatorConfig
    verbosity: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        corpus = Path(args.corpus) if args.corpus else None
        if corpus is not None and not corpus.is_dir():
            raise CliError(f"corpus directory not found: {corpus}")
        try:
            translator = TranslatorConfig.from_file(args.config) if args.config else TranslatorConfig()
        except OSError as e:
            raise CliError(f"cannot read config: {e}") from e
        except (ValueError, TypeError) as e:
            raise CliError(f"bad config {args.config}: {e}") from e
        return cls(corpus, Path(args.runs), translator, args.verbose)


def _load(ref: str, cfg: CliConfig) -> Puzzle:
    try:
        return load_puzzle(find_puzzle(ref, cfg.corpus))
    except OSError as e:
        raise CliError(str(e)) from e
    except CorpusError as e:
        raise CliError(f"{ref}: {e}") from e


def _client(args: argparse.Namespace, p: Puzzle, cfg: CliConfig) -> Translator:
    if args.live:
        try:
            return ChatClient(cfg.translator)
        except AuthError as e:
            raise CliError(f"AuthError: {e}") from e
    template = cfg.translator.prompt_template
    if args.mock == "gold":
        return MockTranslator.gold(p, template)
    try:
        return MockTranslator.from_file(args.mock, p, template)
    except OSError as e:
        raise CliError(f"cannot read mock script: {e}") from e
    except ValueError as e:
        raise CliError(f"bad mock script {args.mock}: {e}") from e


def _gloss_suffix(p: Puzzle, target) -> str:
    if isinstance(target, Atom) and p.vocab.gloss(target.name):
        return f" ({p.vocab.gloss(target.name)})"
    return ""


# -- commands -----------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, cfg: CliConfig) -> int:
    p = _load(args.puzzle, cfg)
    if p.independent:
        print(f"{p.name}: independent statements, no joint KB")
        bad = [s.id for s in p.statements if not satisfiable(s.gold)]
        for s in p.statements:
            print(f"  {s.id}: {'unsatisfiable' if s.id in bad else 'satisfiable'}")
        return EXIT_FAIL if bad else EXIT_OK
    kb = p.gold_kb()
    if not consistent(kb):
        print("KB inconsistent")
        return EXIT_FAIL
    for q in p.queries:
        print(f"{to_text(q.target)}: {classify(kb, q.target).value}{_gloss_suffix(p, q.target)}")
    print()
    print("backbone:")
    try:
        report = backbone(kb)
    except InconsistentKb:  # pragma: no cover - ruled out above
        print("KB inconsistent")
        return EXIT_FAIL
    for row in backbone_table(report, p.vocab):
        print(f"  {row}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace, cfg: CliConfig) -> int:
    try:
        path = find_puzzle(args.puzzle, cfg.corpus)
        p = load_puzzle(path)
    except OSError as e:
        raise CliError(str(e)) from e
    except CorpusError as e:
        print(f"{args.puzzle}: {type(e).__name__}: {e}")
        return EXIT_FAIL
    violations = validate_puzzle(p)
    for v in violations:
        print(f"{p.name}: {v}")
    if not violations:
        print(f"{p.name}: ok")
    return EXIT_FAIL if violations else EXIT_OK


def cmd_translate(args: argparse.Namespace, cfg: CliConfig) -> int:
    p = _load(args.puzzle, cfg)
    client = _client(args, p, cfg)
    run_dir = make_run_dir(cfg.runs)
    if args.mode == "direct-qa":
        rec = direct_qa(p, cfg.translator, client, TranscriptSink(run_dir / f"{p.name}.direct-qa.jsonl"))
        print(f"wrote {run_dir}")
        print(rec.response)
        return EXIT_FAIL if rec.error else EXIT_OK
    mode = TranslationMode(args.mode)
    sink = TranscriptSink(run_dir / f"{p.name}.{mode.value}.jsonl")
    result = translate(p, mode, cfg.translator, client, sink)
    write_candidates(run_dir / f"{p.name}.{mode.value}.candidates.json", p, mode, result.candidates)
    parsed = sum(c.formula is not None for c in result.candidates)
    print(f"wrote {run_dir}")
    print(f"{len(result.candidates)} candidates, {parsed} parsed, {len(result.transcripts)} requests")
    for c in result.candidates:
        if c.formula is not None:
            print(f"  {c.statement_id}. {to_text(c.formula)}")
        else:
            print(f"  {c.statement_id}. [{c.error.kind.value}] {c.error.detail}")
    failed_requests = [r for r in result.transcripts if r.error]
    return EXIT_FAIL if failed_requests else EXIT_OK


def cmd_eval(args: argparse.Namespace, cfg: CliConfig) -> int:
    p = _load(args.puzzle, cfg)
    if args.candidates:
        try:
            file_mode, candidates = read_candidates(args.candidates, p)
        except OSError as e:
            raise CliError(f"cannot read candidates: {e}") from e
        except (ValueError, KeyError) as e:
            raise CliError(f"bad candidates file {args.candidates}: {e}") from e
        mode = TranslationMode(args.mode) if args.mode else file_mode or TranslationMode.WHOLE_TEXT
    else:
        mode = TranslationMode(args.mode or TranslationMode.WHOLE_TEXT.value)
        client = _client(args, p, cfg)
        run_dir = make_run_dir(cfg.runs)
        sink = TranscriptSink(run_dir / f"{p.name}.{mode.value}.jsonl")
        candidates = translate(p, mode, cfg.translator, client, sink).candidates
        log.info("transcripts in %s", run_dir)
    try:
        result = assess(candidates, p, mode)
    except ValueError as e:
        raise CliError(str(e)) from e
    sys.stdout.write(render_report([result.score, result.report], args.format))
    return EXIT_OK if result.report.verdict is Verdict.ALL_CORRECT else EXIT_FAIL


def cmd_export_dimacs(args: argparse.Namespace, cfg: CliConfig) -> int:
    p = _load(args.puzzle, cfg)
    if p.independent:
        raise CliError(f"{p.name} has independent statements and no queries")
    if not 0 <= args.query < len(p.queries):
        raise CliError(f"query index {args.query} out of range (puzzle has {len(p.queries)} queries)")
    q = p.queries[args.query]
    cnf = to_cnf(conj([p.gold_kb().formula(), Not(q.target)]), p.vocab.ids)
    verdict = "SAT" if solve(cnf).satisfiable else "UNSAT"
    text = to_dimacs(
        cnf,
        comments=[
            f"{p.name}: KB AND NOT ({to_text(q.target)})",
            f"internal verdict: {verdict}",
        ],
    )
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(args.output).write_text(text, encoding="ascii")
        except OSError as e:
            raise CliError(f"cannot write {args.output}: {e}") from e
        print(f"wrote {args.output} ({verdict})", file=sys.stderr)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _add_source(sp: argparse.ArgumentParser, candidates: bool) -> None:
    group = sp.add_mutually_exclusive_group(required=True)
    if candidates:
        group.add_argument("--candidates", metavar="FILE", help="candidates file from a previous translate run")
    group.add_argument("--mock", metavar="SCRIPT", help="offline replies: a mock script file, or 'gold'")
    group.add_argument("--live", action="store_true", help="call the configured chat-completion endpoint")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="text2logic", description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", metavar="DIR", help="puzzle directory (default: bundled corpus)")
    ap.add_argument("--runs", metavar="DIR", default="runs", help="run output root (default: %(default)s)")
    ap.add_argument("--config", metavar="FILE", help="translator config (JSON)")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="answer a puzzle's queries from its gold KB")
    sp.add_argument("puzzle", help="puzzle file, corpus name or unique name suffix")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("check", help="validate a puzzle file")
    sp.add_argument("puzzle")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("translate", help="translate a puzzle with an LLM or a mock")
    sp.add_argument("puzzle")
    sp.add_argument("--mode", choices=["whole", "stepwise", "direct-qa"], default="whole")
    _add_source(sp, candidates=False)
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("eval", help="score candidates and run the end-to-end pipeline")
    sp.add_argument("puzzle")
    sp.add_argument("--mode", choices=["whole", "stepwise"])
    sp.add_argument("--format", choices=["table", "json"], default="table")
    _add_source(sp, candidates=True)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("export-dimacs", help="write KB AND NOT query as DIMACS CNF")
    sp.add_argument("puzzle")
    sp.add_argument("query", type=int, help="0-based query index")
    sp.add_argument("-o", "--output", metavar="FILE", help="output file (default: stdout)")
    sp.set_defaults(func=cmd_export_dimacs)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = CliConfig.from_args(args)
        return args.func(args, cfg)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
