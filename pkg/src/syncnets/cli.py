"""Command-line driver.  Structured output is JSON on stdout, diagnostics go
to stderr.  Exit codes: 0 success, 1 domain failure, 2 usage error."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .correctness import find_switching_cycle, is_correct
from .net import Net, NetError, QuantumNet, Sort
from .netio import dump, load, net_to_dict, to_dot
from .qlambda import (
    LambdaSyntaxError,
    LambdaTypeError,
    big_step,
    closure,
    is_value,
    parse,
    show_term,
    show_type,
    small_step,
    typecheck,
)
from .qregister import BUILTIN_GATES, RegisterError, load_gates
from .qsiam import QInterpretation, qinterpret, sample
from .rewrite import multi_step, normalize
from .siam import Interpretation, Machine, exhaustive_finals, run
from .simulate import Unreadable, as_table, evaluate_dist, readout_machine, readout_net, readout_value
from .translate import translate_closure, translate_derivation


class DomainFailure(Exception):
    pass


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, default=str))


def _read_program(path: str):
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    return parse(p.read_text())


def _read_net(path: str) -> Net | QuantumNet:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    if p.suffix == ".qlam":
        raise UsageError(f"{path} is a program; compile it first")
    return load(p)


def _plain(n: Net | QuantumNet) -> Net:
    return n.net if isinstance(n, QuantumNet) else n


def _quantum(n: Net | QuantumNet) -> QuantumNet:
    return n if isinstance(n, QuantumNet) else QuantumNet.plain(n)


def _seed_strategy(s: str) -> str:
    if s == "det" or s == "exhaustive" or (s.startswith("seed:") and s[5:].lstrip("-").isdigit()):
        return s
    raise argparse.ArgumentTypeError(f"expected det, seed:N or exhaustive, got {s!r}")


# -- commands ----------------------------------------------------------------------------

def cmd_parse(args, gates):
    t = _read_program(args.file)
    _emit({"term": show_term(t)})


def cmd_typecheck(args, gates):
    d = typecheck(_read_program(args.file), gates=gates)
    _emit({
        "type": show_type(d.type),
        "context": [{"name": c.name, "kind": c.kind, "type": show_type(c.type)} for c in d.ctx],
    })


def cmd_compile(args, gates):
    t = _read_program(args.file)
    d = typecheck(t, gates=gates)
    ports = translate_derivation(d, gates).port_table()
    qn = translate_closure(closure(t), gates)
    if args.output:
        dump(qn, args.output, ports)
        print(f"wrote {args.output}: {len(qn.net.links)} links", file=sys.stderr)
    else:
        _emit(net_to_dict(qn, ports))


def cmd_check(args, gates):
    n = _plain(_read_net(args.file))
    w = find_switching_cycle(n)
    ok = is_correct(n)
    _emit({"correct": ok, "cycle": w.edges()})
    if not ok:
        if w:
            print("switching cycle through edges " + " ".join(map(str, w.edges())), file=sys.stderr)
        else:
            print("a box content is incorrect", file=sys.stderr)
        raise DomainFailure


def _is_quantum(n: Net | QuantumNet) -> bool:
    if isinstance(n, QuantumNet) and n.wiring:
        return True
    return any(l.label for l in _plain(n).links_of(Sort.SYNC))


def cmd_normalize(args, gates):
    loaded = _read_net(args.file)
    if args.strategy == "exhaustive":
        raise UsageError("normalize takes det or seed:N")
    if _is_quantum(loaded) and not args.plain:
        if args.trace or args.format == "dot":
            raise UsageError("--trace and --format dot need a plain net (or --plain)")
        dist = multi_step(loaded, gates)
        body = {"outcomes": [{"prob": p, "net": net_to_dict(qn)} for p, qn in dist]}
        try:
            body["values"] = as_table([(p, readout_net(qn)) for p, qn in dist])
        except Unreadable:
            pass
        _emit(body)
        return
    n = _plain(loaded)
    if not is_correct(n):
        print("net is not correct", file=sys.stderr)
        raise DomainFailure
    nf, trace = normalize(n, args.strategy, record=args.trace)
    if args.trace:
        for k, st in enumerate(trace):
            _emit(st.to_json(k))
    if args.format == "dot":
        sys.stdout.write(to_dot(nf))
    else:
        _emit({"normalForm": net_to_dict(nf)})


def _injection(i: Interpretation):
    return None if i.deadlock else [[list(a), list(b)] for a, b in sorted(i.pairs)]


def cmd_run_siam(args, gates):
    n = _plain(_read_net(args.file))
    m = Machine(n)
    if args.schedule == "exhaustive":
        finals = exhaustive_finals(n, m)
        outs = [{"outcome": "final" if m.is_final(s) else "deadlock",
                 "interpretation": _injection(m.interpretation(s))} for s in finals]
        _emit({"finalStates": len(finals), "runs": outs})
        if any(o["outcome"] == "deadlock" for o in outs):
            raise DomainFailure
        return
    res = run(n, args.schedule, record=args.trace, machine=m)
    if args.trace:
        for row in res.trace:
            _emit(row)
    _emit({"outcome": res.outcome, "interpretation": _injection(m.interpretation(res.final))})
    if res.outcome == "deadlock":
        print("run deadlocked", file=sys.stderr)
        raise DomainFailure


def cmd_run_qsiam(args, gates):
    qn = _quantum(_read_net(args.file))
    if args.shots is not None:
        outcomes = sample(qn, args.shots, args.seed, gates=gates)
    else:
        outcomes = list(qinterpret(qn, gates=gates).outcomes)
    body = {"outcomes": [o.to_json() for o in outcomes]}
    try:
        body["values"] = as_table(readout_machine(qn.net, QInterpretation(tuple(outcomes))))
    except Unreadable:
        pass
    _emit(body)
    if any(o.injection.deadlock for o in outcomes):
        raise DomainFailure


def cmd_eval(args, gates):
    c = closure(_read_program(args.file))
    typecheck(c.term, gates=gates)
    if args.dist:
        try:
            _emit(as_table(evaluate_dist(c, gates)))
        except Unreadable:
            _emit({str(v): p for p, v in big_step(c, gates)})
        return
    rng = random.Random(args.seed)
    cur = c
    while not is_value(cur.term):
        branches = small_step(cur, gates)
        cur = rng.choices([b for _, b in branches], weights=[p for p, _ in branches])[0]
    try:
        _emit({"value": readout_value(cur).show(), "closure": str(cur)})
    except Unreadable:
        _emit({"closure": str(cur)})


def cmd_dot(args, gates):
    p = Path(args.file)
    if p.suffix == ".qlam":
        sys.stdout.write(to_dot(translate_closure(closure(_read_program(args.file)), gates)))
    else:
        sys.stdout.write(to_dot(_read_net(args.file)))


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="syncnets", description=__doc__)
    ap.add_argument("--gates", help="JSON file of extra unitaries")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a program and print it back")
    p.add_argument("file")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("typecheck", help="infer the type of a program")
    p.add_argument("file")
    p.set_defaults(fn=cmd_typecheck)

    p = sub.add_parser("compile", help="translate a program into a quantum net")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("check", help="run the correctness criterion")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("normalize", help="reduce a net to normal form")
    p.add_argument("file")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--strategy", default="det", type=_seed_strategy)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--plain", action="store_true",
                   help="ignore gate labels and the register; use the plain rules")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("run-siam", help="run the token machine")
    p.add_argument("file")
    p.add_argument("--schedule", default="det", type=_seed_strategy)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(fn=cmd_run_siam)

    p = sub.add_parser("run-qsiam", help="run the quantum token machine")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="explore the full probability tree (default)")
    mode.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_run_qsiam)

    p = sub.add_parser("eval", help="evaluate a program")
    p.add_argument("file")
    p.add_argument("--dist", action="store_true", help="print the outcome distribution")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("dot", help="export a net (or a compiled program) as DOT")
    p.add_argument("file")
    p.set_defaults(fn=cmd_dot)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        gates = load_gates(args.gates) if args.gates else BUILTIN_GATES
        if args.command == "run-qsiam" and args.shots is not None and args.shots <= 0:
            raise UsageError("--shots must be positive")
        args.fn(args, gates)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DomainFailure:
        return 1
    except (LambdaSyntaxError, LambdaTypeError, NetError, RegisterError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
