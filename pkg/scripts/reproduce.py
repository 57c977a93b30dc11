#!/usr/bin/env python3
"""Regenerate every offline result: query answers, backbones, encoding scores.

Everything runs against the bundled corpus and the scripted responses in
fixtures/, so the output is deterministic. Writes ``results.json`` and
``results.md`` into the output directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from text2logic.corpus import bundled, validate_puzzle
from text2logic.evaluator import assess
from text2logic.parser import to_text
from text2logic.reasoner import backbone, classify, consistent
from text2logic.translator import MockTranslator, TranslationMode, TranslatorConfig, read_candidates, translate

ROOT = Path(__file__).resolve().parents[1]


@dataclass(frozen=True)
class Run:
    puzzle: str
    label: str
    script: str | None = None  # mock script in fixtures/, None for gold
    candidates: str | None = None  # candidates file in fixtures/


RUNS = (
    Run("who_is_in_the_car", "gold"),
    Run("who_is_in_the_car", "strange driver formula", script="car_strange.json"),
    Run("alpine_club", "gold"),
    Run("ladies_or_tigers_trial_1", "gold"),
    Run("ladies_or_tigers_trial_1", "refused statement", script="trial1_refusal.json"),
    Run("ladies_or_tigers_trial_1", "conjoined room cases", candidates="gpt4_trial2_style.json"),
    Run("three_balls", "gold"),
    Run("three_balls", "GPT4 answers", script="gpt4_balls.json"),
    Run("three_balls", "ChatGPT answers", script="chatgpt_balls.json"),
)


def answers(p) -> dict:
    if p.independent:
        return {"independent": True}
    kb = p.gold_kb()
    if not consistent(kb):
        return {"consistent": False}
    return {
        "consistent": True,
        "queries": {to_text(q.target): classify(kb, q.target).value for q in p.queries},
        "backbone": {k: v.value for k, v in backbone(kb).items()},
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--fixtures", type=Path, default=ROOT / "fixtures")
    args = ap.parse_args()

    puzzles = {p.name: p for p in bundled()}
    cfg = TranslatorConfig()
    doc = {"puzzles": {}, "runs": []}
    md = ["# Offline results", ""]

    for name, p in puzzles.items():
        violations = [str(v) for v in validate_puzzle(p)]
        doc["puzzles"][name] = {"violations": violations, **answers(p)}

    md += ["## Gold knowledge bases", ""]
    for name, info in doc["puzzles"].items():
        md.append(f"### {name}")
        if info.get("independent"):
            md.append("independent statements, no joint KB")
        for q, status in info.get("queries", {}).items():
            md.append(f"- `{q}`: {status}")
        if "backbone" in info:
            forced = [f"{k}={v}" for k, v in info["backbone"].items() if v != "Free"]
            md.append(f"- forced: {', '.join(forced) or 'none'}")
        md.append("")

    md += ["## Encodings", ""]
    for run in RUNS:
        p = puzzles[run.puzzle]
        for mode in TranslationMode:
            if run.candidates:
                if mode is not TranslationMode.WHOLE_TEXT:
                    continue
                _, cands = read_candidates(args.fixtures / run.candidates, p)
            else:
                client = MockTranslator.from_file(args.fixtures / run.script, p) if run.script else MockTranslator.gold(p)
                cands = translate(p, mode, cfg, client).candidates
            a = assess(cands, p, mode)
            doc["runs"].append({"label": run.label, **a.score.to_dict(), "end_to_end": a.report.to_dict()})
            md.append(f"- {run.puzzle} / {run.label} / {mode.value}: "
                      f"{a.score.ratio[0]}/{a.score.ratio[1]}, KB {a.report.kb_status}, {a.report.verdict.value}")
    md.append("")

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "results.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    (args.out / "results.md").write_text("\n".join(md), encoding="utf-8")
    print("\n".join(md))
    return 1 if any(info["violations"] for info in doc["puzzles"].values()) else 0


if __name__ == "__main__":
    sys.exit(main())
