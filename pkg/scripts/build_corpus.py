"""Compile every program in programs/ to a net file next to it, and write the
reference nets to programs/nets/.  Rerun after changing the translation."""

import argparse
from pathlib import Path

from syncnets.figures import FIGURES
from syncnets.netio import dump
from syncnets.qlambda import closure, parse, typecheck
from syncnets.translate import translate_closure, translate_derivation

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--programs", type=Path, default=ROOT / "programs")
    args = ap.parse_args()
    for src in sorted(args.programs.glob("*.qlam")):
        t = parse(src.read_text())
        ports = translate_derivation(typecheck(t)).port_table()
        qn = translate_closure(closure(t))
        out = src.with_suffix(".net.json")
        dump(qn, out, ports)
        print(f"{src.name:24s} -> {out.name} ({len(qn.net.links)} links)")
    nets = args.programs / "nets"
    nets.mkdir(exist_ok=True)
    for name, make in FIGURES.items():
        dump(make(), nets / f"{name}.net.json")
        print(f"{name:24s} -> nets/{name}.net.json")


if __name__ == "__main__":
    main()
