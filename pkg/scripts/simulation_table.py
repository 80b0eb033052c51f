"""Print each program's result distribution under evaluation, net rewriting
and the quantum token machine, and whether the three agree.

    python3 scripts/simulation_table.py               # programs/
    python3 scripts/simulation_table.py --random 50   # plus 50 generated programs
"""

import argparse
import json
import time
from pathlib import Path

from syncnets.generators import ProgramGenConfig, random_program
from syncnets.qlambda import closure, show_term
from syncnets.simulate import as_table, three_levels

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--programs", type=Path, default=ROOT / "programs")
    ap.add_argument("--random", type=int, default=0, help="number of generated programs to add")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="one JSON object per program")
    args = ap.parse_args()

    jobs = [(p.stem, closure(p.read_text())) for p in sorted(args.programs.glob("*.qlam"))]
    for k in range(args.random):
        t = random_program(args.seed + k, ProgramGenConfig())
        jobs.append((f"random/{args.seed + k}", closure(t)))

    disagree = 0
    t0 = time.perf_counter()
    for name, c in jobs:
        levels = three_levels(c)
        disagree += not levels.agree
        if args.json:
            print(json.dumps({"program": name, "term": show_term(c.term), **levels.to_json()}))
            continue
        table = ", ".join(f"{v}: {p:.4f}" for v, p in sorted(as_table(levels.evaluation).items()))
        print(f"{name:16s} {'ok ' if levels.agree else 'BAD'} {table}")
    print(f"{len(jobs)} programs, {disagree} disagreements, {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
