"""Compilation of typing derivations into nets with labelled sync links.

A derivation of ``x1:A1, ..., xn:An |- t : B`` becomes a net whose
conclusions are the duals of the context types, in context order, followed
by the translation of ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .formula import ONE, Formula, Par, Tensor, negate
from .net import Net, NetBuilder, QuantumNet
from .qlambda import (
    BoolT,
    Closure,
    CtxEntry,
    Derivation,
    Lolli,
    LType,
    QubitT,
    Tens,
    Term,
    typecheck,
)
from .qregister import BUILTIN_GATES, UnitarySpec


class UnknownGate(KeyError):
    pass


def translate_type(a: LType) -> Formula:
    if isinstance(a, (BoolT, QubitT)):
        return ONE
    if isinstance(a, Lolli):
        return Par(negate(translate_type(a.arg)), translate_type(a.res))
    if isinstance(a, Tens):
        return Tensor(translate_type(a.left), translate_type(a.right))
    raise TypeError(f"cannot translate {a!r}")


def identity(b: NetBuilder, a: Formula) -> tuple[int, int]:
    """Eta-expanded axiom on ``a``: (edge typed a, edge typed dual a)."""
    if isinstance(a, (Tensor, Par)):
        p1, n1 = identity(b, a.left)
        p2, n2 = identity(b, a.right)
        if isinstance(a, Tensor):
            return b.tensor(p1, p2), b.par(n1, n2)
        return b.par(p1, p2), b.tensor(n1, n2)
    return b.ax(a)


def boolean_net(value: bool) -> Net:
    """tt is a fresh 1 passed through the identity gate, ff through X."""
    b = NetBuilder()
    (out,) = b.sync([b.one()], "I" if value else "X")
    return b.finish([out])


def measurement_net() -> Net:
    b = NetBuilder()
    lock, (out,) = b.bot([boolean_net(True), boolean_net(False)])
    return b.finish([b.par(lock, out)])


def unitary_net(name: str, arity: int) -> Net:
    b = NetBuilder()
    ones, bots = [], []
    for _ in range(arity):
        one, bot = b.ax(ONE)
        ones.append(one)
        bots.append(bot)
    outs = b.sync(bots, name)
    inp, res = outs[0], ones[0]
    for o, one in zip(outs[1:], ones[1:]):
        inp = b.par(inp, o)
        res = b.tensor(res, one)
    return b.finish([b.par(inp, res)])


@dataclass
class Compiled:
    """A translated derivation: ports for the context, then the output."""

    net: Net
    ctx: tuple[CtxEntry, ...]

    def port(self, name: str, kind: str = "v") -> int:
        for i, c in enumerate(self.ctx):
            if c.name == name and c.kind == kind:
                return self.net.conclusions[i]
        raise KeyError(name)

    @property
    def out(self) -> int:
        return self.net.conclusions[-1]

    def port_table(self) -> list[dict]:
        rows = [{"name": c.name, "kind": c.kind, "edge": e}
                for c, e in zip(self.ctx, self.net.conclusions)]
        rows.append({"name": "<result>", "kind": "out", "edge": self.out})
        return rows


class _Translator:
    def __init__(self, gates: Mapping[str, UnitarySpec]):
        self.gates = gates

    def build(self, b: NetBuilder, d: Derivation) -> tuple[dict[tuple[str, str], int], int]:
        """Translate ``d`` into ``b``; returns ({(kind, name): port edge}, output edge)."""
        r = d.rule
        if r in ("ax", "qax"):
            (c,) = d.ctx
            pos, neg = identity(b, translate_type(c.type))
            return {(c.kind, c.name): neg}, pos
        if r == "tt" or r == "ff":
            (out,) = b.embed(boolean_net(r == "tt"))
            return {}, out
        if r == "new":
            return {}, b.one()
        if r == "meas":
            (out,) = b.embed(measurement_net())
            return {}, out
        if r == "unitary":
            name = d.term.name
            if name not in self.gates:
                raise UnknownGate(name)
            (out,) = b.embed(unitary_net(name, self.gates[name].arity))
            return {}, out
        if r == "lam":
            (body,) = d.children
            ports, out = self.build(b, body)
            x = ports.pop(("v", d.term.var))
            return ports, b.par(x, out)
        if r == "app":
            f, x = d.children
            fp, fo = self.build(b, f)
            xp, xo = self.build(b, x)
            pos, neg = identity(b, translate_type(d.type))
            b.cut(fo, b.tensor(xo, neg))
            return {**fp, **xp}, pos
        if r == "pair":
            a, c = d.children
            ap, ao = self.build(b, a)
            cp, co = self.build(b, c)
            return {**ap, **cp}, b.tensor(ao, co)
        if r == "let":
            bound, body = d.children
            tp, to = self.build(b, bound)
            up, uo = self.build(b, body)
            x = up.pop(("v", d.term.x))
            y = up.pop(("v", d.term.y))
            b.cut(to, b.par(x, y))
            return {**tp, **up}, uo
        if r == "if":
            cond, then, else_ = d.children
            cp, co = self.build(b, cond)
            lock, (out,) = b.bot([self.closed_net(then), self.closed_net(else_)])
            b.cut(co, lock)
            return cp, out
        raise ValueError(f"unknown rule {r}")

    def closed_net(self, d: Derivation) -> Net:
        b = NetBuilder()
        ports, out = self.build(b, d)
        assert not ports
        return b.finish([out])


def translate_derivation(d: Derivation, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> Compiled:
    b = NetBuilder()
    ports, out = _Translator(gates).build(b, d)
    order = [ports[(c.kind, c.name)] for c in d.ctx]
    return Compiled(b.finish(order + [out]), d.ctx)


def translate_term(t: Term, ctx=None, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> Compiled:
    return translate_derivation(typecheck(t, ctx, gates), gates)


def translate_closure(c: Closure, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> QuantumNet:
    """One one link per quantum variable, cut against its port and wired to the register."""
    d = typecheck(c.term, None, gates)
    if any(e.kind == "v" for e in d.ctx):
        raise ValueError("closure term has free lambda variables")
    compiled = translate_derivation(d, gates)
    b = NetBuilder()
    concl = b.embed(compiled.net)
    wiring = {}
    for entry, port in zip(d.ctx, concl):
        one = b.one()
        wiring[entry.name] = b.edges[one].src[0]
        b.cut(one, port)
    net = b.finish([concl[-1]])
    missing = set(c.register.qubits) - set(wiring)
    if missing:
        raise ValueError(f"register wires {sorted(missing)} do not occur in the term")
    return QuantumNet(net, c.register, wiring)


def cut_with(d1: Derivation, x: str, d2: Derivation, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> Net:
    """Cut the port of ``x`` in the translation of ``d1`` against the output of ``d2``."""
    entry = d1.lookup(x)
    if d2.ctx:
        raise ValueError("the substituted derivation must have an empty context")
    if entry.type != d2.type:
        raise TypeError(f"{x} has type {entry.type}, substituted term has {d2.type}")
    c1 = translate_derivation(d1, gates)
    c2 = translate_derivation(d2, gates)
    b = NetBuilder()
    concl = b.embed(c1.net)
    (out2,) = b.embed(c2.net)
    keep = []
    for e, port in zip(d1.ctx, concl):
        if e.kind == "v" and e.name == x:
            b.cut(port, out2)
        else:
            keep.append(port)
    return b.finish(keep + [concl[-1]])


__all__ = [
    "UnknownGate", "translate_type", "identity", "boolean_net", "measurement_net", "unitary_net",
    "Compiled", "translate_derivation", "translate_term", "translate_closure", "cut_with",
]
