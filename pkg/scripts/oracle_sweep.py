#!/usr/bin/env python3
"""Cross-check the CNF/DPLL path against truth tables on random formulas.

Reports discrepancies (expected: none), model counts and throughput. Failing
formulas are printed in the text syntax so they can be pasted into a test.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass, field

from text2logic.generate import random_formula, symbol_pool
from text2logic.logic import free_symbols
from text2logic.oracle import truth_table
from text2logic.parser import to_text
from text2logic.sat import check_model, enumerate_models, solve, to_cnf


@dataclass
class SweepConfig:
    count: int = 10_000
    max_vars: int = 12
    min_depth: int = 2
    max_depth: int = 6
    seed: int = 0
    project_to_free: bool = True  # enumerate over the formula's own symbols


@dataclass
class SweepResult:
    checked: int = 0
    satisfiable: int = 0
    models: int = 0
    seconds: float = 0.0
    failures: list[str] = field(default_factory=list)


def sweep(cfg: SweepConfig) -> SweepResult:
    rng = random.Random(cfg.seed)
    out = SweepResult()
    start = time.perf_counter()
    for _ in range(cfg.count):
        pool = symbol_pool(rng.randint(1, cfg.max_vars))
        f = random_formula(rng, pool, rng.randint(cfg.min_depth, cfg.max_depth))
        names = list(free_symbols(f)) if cfg.project_to_free else pool
        table = truth_table(f, names)
        cnf = to_cnf(f, names)
        outcome = solve(cnf)
        out.checked += 1
        if outcome.satisfiable != (table != 0):
            out.failures.append(f"solve: {to_text(f)}")
            continue
        if outcome.satisfiable:
            out.satisfiable += 1
            if not check_model(cnf, outcome.values):
                out.failures.append(f"model: {to_text(f)}")
        ms = enumerate_models(f, names, 1 << len(names))
        rows = [sum(1 << i for i, s in enumerate(names) if m[s]) for m in ms]
        if len(rows) != len(set(rows)) or set(rows) != {r for r in range(1 << len(names)) if table >> r & 1}:
            out.failures.append(f"enumerate: {to_text(f)}")
        out.models += len(rows)
    out.seconds = time.perf_counter() - start
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    defaults = SweepConfig()
    ap.add_argument("--count", type=int, default=defaults.count)
    ap.add_argument("--max-vars", type=int, default=defaults.max_vars)
    ap.add_argument("--max-depth", type=int, default=defaults.max_depth)
    ap.add_argument("--seed", type=int, default=defaults.seed)
    ap.add_argument("--full-pool", action="store_true", help="enumerate over the whole symbol pool, not just free symbols")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    cfg = SweepConfig(
        count=args.count,
        max_vars=args.max_vars,
        max_depth=args.max_depth,
        seed=args.seed,
        project_to_free=not args.full_pool,
    )
    res = sweep(cfg)
    if args.json:
        print(json.dumps({"config": asdict(cfg), "result": asdict(res)}, indent=2))
    else:
        print(f"checked {res.checked} formulas ({res.satisfiable} satisfiable), {res.models} models")
        print(f"{res.seconds:.1f} s, {res.checked / max(res.seconds, 1e-9):.0f} formulas/s")
        print(f"discrepancies: {len(res.failures)}")
        for line in res.failures[:20]:
            print(f"  {line}")
    return 1 if res.failures else 0


if __name__ == "__main__":
    sys.exit(main())
