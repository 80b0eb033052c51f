"""Readouts of final results at the three levels and their comparison.

A readout is a state vector over the leaves of the result's tuple shape,
left to right, with a boolean leaf read as a qubit in |0> (tt) or |1> (ff).
The shape template prints the tuple nesting, e.g. ``<<_,_>,_>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .formula import One, Tensor, signed_atoms
from .net import Net, QuantumNet, Sort
from .qlambda import FF, Closure, Pair, QVar, Term, TT, big_step, closure, show_term
from .qregister import BUILTIN_GATES, TOL, QuantumRegister, UnitarySpec
from .qsiam import QInterpretation, qinterpret
from .rewrite import multi_step
from .translate import translate_closure


class Unreadable(ValueError):
    """The result is not built from booleans, qubits and pairs."""


@dataclass(frozen=True, eq=False)
class Readout:
    shape: str
    state: np.ndarray

    def same(self, other: "Readout", tol: float = TOL) -> bool:
        return self.shape == other.shape and np.allclose(self.state, other.state, atol=tol, rtol=0)

    def classical(self, tol: float = TOL) -> str | None:
        """``tt``, ``<tt,ff>`` and so on when the state is a basis state."""
        i = int(np.argmax(np.abs(self.state)))
        if abs(abs(self.state[i]) - 1) > tol:
            return None
        n = self.shape.count("_")
        bits = format(i, f"0{n}b") if n else ""
        out = self.shape
        for b in bits:
            out = out.replace("_", "tt" if b == "0" else "ff", 1)
        return out

    def show(self) -> str:
        c = self.classical()
        if c is not None:
            return c
        n = self.shape.count("_")
        reg = QuantumRegister(tuple(range(n)), self.state)
        return f"{self.shape} {reg.pretty()}"


Distribution = list[tuple[float, Readout]]


def _assemble(shape: str, leaves: list, register: QuantumRegister) -> Readout:
    """``leaves`` holds 0/1 for classical leaves and a wire name for quantum ones."""
    wires = [w for w in leaves if not isinstance(w, int)]
    if sorted(map(repr, wires)) != sorted(map(repr, register.qubits)):
        raise Unreadable(f"register wires {register.qubits} do not match the result leaves {wires}")
    rename = {w: i for i, w in enumerate(leaves) if not isinstance(w, int)}
    reg = register.rename(rename)
    classical = {i: w for i, w in enumerate(leaves) if isinstance(w, int)}
    if classical:
        reg = reg.tensor_with(QuantumRegister.basis(classical))
    return Readout(shape, reg.reorder(list(range(len(leaves)))))


def readout_value(c: Closure) -> Readout:
    leaves: list = []

    def go(t: Term) -> str:
        if isinstance(t, TT):
            leaves.append(0)
            return "_"
        if isinstance(t, FF):
            leaves.append(1)
            return "_"
        if isinstance(t, QVar):
            leaves.append(("q", t.name))
            return "_"
        if isinstance(t, Pair):
            return f"<{go(t.left)},{go(t.right)}>"
        raise Unreadable(f"value {show_term(t)} is not a tuple of booleans and qubits")

    shape = go(c.term)
    reg = c.register.rename({q: ("q", q) for q in c.register.qubits})
    return _assemble(shape, leaves, reg)


def readout_net(qn: QuantumNet) -> Readout:
    """Read a normal form whose single conclusion is a tensor tree of one links."""
    n = qn.net
    if len(n.conclusions) != 1:
        raise Unreadable("expected one conclusion")
    wire = {lid: name for name, lid in qn.wiring.items()}
    leaves: list = []

    def go(e: int) -> str:
        l = n.links[n.edges[e].src[0]]
        if l.sort is Sort.TENSOR:
            return f"<{go(l.premisses[0])},{go(l.premisses[1])}>"
        if l.sort is Sort.ONE:
            leaves.append(wire.get(l.id, 0))
            return "_"
        raise Unreadable(f"conclusion built by a {l.sort.value} link")

    shape = go(n.conclusions[0])
    return _assemble(shape, leaves, qn.register)


def _formula_shape(a) -> str:
    if isinstance(a, One):
        return "_"
    if isinstance(a, Tensor):
        return f"<{_formula_shape(a.left)},{_formula_shape(a.right)}>"
    raise Unreadable("result type is not a tensor of ones")


def readout_machine(net: Net, interp: QInterpretation) -> Distribution:
    """Final positions of the last conclusion, in address order, carry the result."""
    ci = len(net.conclusions) - 1
    ty = net.type_of(net.conclusions[ci])
    shape = _formula_shape(ty)
    addrs = [m for m, _ in signed_atoms(ty)]
    out = []
    for o in interp.outcomes:
        if o.injection.deadlock:
            raise Unreadable("deadlocked run")
        leaves = [("out", ci, m) if ("out", ci, m) in o.register.qubits else 0 for m in addrs]
        out.append((o.prob, _assemble(shape, leaves, o.register)))
    return out


def aggregate(dist: Distribution, tol: float = TOL) -> Distribution:
    merged: list[list] = []
    for p, r in dist:
        for entry in merged:
            if entry[1].same(r, tol):
                entry[0] += p
                break
        else:
            merged.append([p, r])
    return [(p, r) for p, r in merged]


def same_distribution(a: Distribution, b: Distribution, tol: float = TOL) -> bool:
    a, b = aggregate(a, tol), aggregate(b, tol)
    if len(a) != len(b):
        return False
    used = set()
    for p, r in a:
        for j, (q, s) in enumerate(b):
            if j not in used and abs(p - q) <= tol and r.same(s, tol):
                used.add(j)
                break
        else:
            return False
    return True


@dataclass
class ThreeLevels:
    """Result distributions of one program under evaluation, rewriting and the machine."""

    evaluation: Distribution
    rewriting: Distribution
    machine: Distribution

    @property
    def agree(self) -> bool:
        return same_distribution(self.evaluation, self.rewriting) and same_distribution(self.evaluation, self.machine)

    def to_json(self) -> dict:
        def dump(d):
            return [{"prob": p, "value": r.show()} for p, r in aggregate(d)]

        return {"evaluation": dump(self.evaluation), "rewriting": dump(self.rewriting),
                "machine": dump(self.machine), "agree": self.agree}


def evaluate_dist(c: Closure, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> Distribution:
    return aggregate([(p, readout_value(v)) for p, v in big_step(c, gates)])


def rewrite_dist(c: Closure, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> Distribution:
    return aggregate([(p, readout_net(qn)) for p, qn in multi_step(translate_closure(c, gates), gates)])


def machine_dist(c: Closure, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> Distribution:
    qn = translate_closure(c, gates)
    return aggregate(readout_machine(qn.net, qinterpret(qn, gates=gates)))


def three_levels(program: Closure | Term | str, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> ThreeLevels:
    c = program if isinstance(program, Closure) else closure(program)
    return ThreeLevels(evaluate_dist(c, gates), rewrite_dist(c, gates), machine_dist(c, gates))


def as_table(dist: Distribution) -> dict[str, float]:
    """``{value: probability}`` for printing; quantum results print their state."""
    out: dict[str, float] = {}
    for p, r in aggregate(dist):
        key = r.show()
        out[key] = out.get(key, 0.0) + p
    return out


__all__ = [
    "Unreadable", "Readout", "readout_value", "readout_net", "readout_machine", "aggregate",
    "same_distribution", "ThreeLevels", "evaluate_dist", "rewrite_dist", "machine_dist",
    "three_levels", "as_table",
]
