"""Quantum token machine: the classical machine plus a register.

Wires are keyed by token origin as ``("at", edge, address)``.  They are
allocated lazily: a token gets a wire the first time a labelled sync or a
lock needs one, in state |0>, unless the net or the caller already supplied
one.  Crossing a labelled sync applies its unitary to the crossing tokens'
wires; a token reaching a lock measures its own wire and the outcome picks
the content.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .net import QuantumNet
from .qregister import BUILTIN_GATES, TOL, QuantumRegister, UnitarySpec
from .siam import DEADLOCK, Interpretation, Machine, MachineError, MachineState, Transition


@dataclass(frozen=True, eq=False)
class QMachineState:
    tokens: MachineState
    register: QuantumRegister

    def same(self, other: "QMachineState", tol: float = TOL) -> bool:
        return self.tokens == other.tokens and self.register.allclose(other.register, tol)


@dataclass(frozen=True, eq=False)
class QOutcome:
    """One point of a quantum interpretation."""

    prob: float
    injection: Interpretation
    register: QuantumRegister

    def to_json(self) -> dict:
        return {
            "prob": self.prob,
            "injection": None if self.injection.deadlock else
            [[list(a), list(b)] for a, b in sorted(self.injection.pairs)],
            "register": self.register.to_json(),
            "state": self.register.pretty(),
        }


@dataclass(frozen=True)
class QInterpretation:
    outcomes: tuple[QOutcome, ...]

    @property
    def total(self) -> float:
        return sum(o.prob for o in self.outcomes)

    def to_json(self) -> dict:
        return {"outcomes": [o.to_json() for o in self.outcomes]}


def _key(origin) -> tuple:
    return ("at",) + tuple(origin)


class QMachine:
    """Transition function of the quantum machine over one quantum net."""

    def __init__(self, qn: QuantumNet, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES):
        self.qn = qn
        self.gates = gates
        self.machine = Machine(qn.net)

    def initial(self, init: QuantumRegister | None = None) -> QMachineState:
        """Start state.  ``init`` may give a state on initial positions keyed ``(conclusion, address)``."""
        n = self.qn.net
        rename = {name: _key((n.links[l].conclusions[0], "")) for name, l in self.qn.wiring.items()}
        reg = self.qn.register.rename(rename)
        if init is not None and len(init):
            where = {}
            for q in init.qubits:
                ci, m = q
                pos = (n.conclusions[ci], m)
                if pos not in self.machine.sets.init:
                    raise MachineError(f"{q} is not an initial position")
                where[q] = _key(pos)
            reg = reg.tensor_with(init.rename(where))
        return QMachineState(self.machine.initial(), reg)

    def _wire(self, reg: QuantumRegister, origin) -> tuple[QuantumRegister, tuple]:
        k = _key(origin)
        return (reg, k) if k in reg.qubits else (reg.fresh(k), k)

    def enabled(self, s: QMachineState) -> list[Transition]:
        return self.machine.enabled(s.tokens)

    def fire(self, s: QMachineState, t: Transition) -> list[tuple[float, QMachineState]]:
        """Fire ``t``; an unlock stands for the whole measurement at that lock."""
        m = self.machine
        reg = s.register
        if t.rule == "sync":
            label = m.net.links[t.link].label
            if label is not None:
                if label not in self.gates:
                    raise MachineError(f"unknown gate {label!r}")
                wires = []
                for origin, _, _ in m.sync_crossings(s.tokens, t.link):
                    reg, k = self._wire(reg, origin)
                    wires.append(k)
                reg = reg.apply(self.gates[label], wires)
            return [(1.0, QMachineState(m.fire(s.tokens, t), reg))]
        if t.rule != "unlock":
            return [(1.0, QMachineState(m.fire(s.tokens, t), reg))]
        contents = m.net.links[t.link].contents
        if contents > 2:
            raise MachineError(f"box {t.link} has {contents} contents; measurement needs at most two")
        k = _key(t.origin)
        lock_pos = t.target[0]
        if k not in reg.qubits:
            return [(1.0, QMachineState(m.fire(s.tokens, Transition("unlock", t.origin, (lock_pos, 0), t.link)), reg))]
        out = []
        for bit in (0, 1):
            p = reg.prob(k, bit)
            if p <= 1e-12:
                continue
            choice = bit if contents == 2 else 0
            nxt = m.fire(s.tokens, Transition("unlock", t.origin, (lock_pos, choice), t.link))
            out.append((p, QMachineState(nxt, reg.project(k, bit))))
        return out

    def outcome(self, s: QMachineState, prob: float) -> QOutcome:
        m = self.machine
        if not m.is_final(s.tokens):
            return QOutcome(prob, DEADLOCK, s.register)
        rename = {}
        for origin, pos in s.tokens.tokens:
            if pos in m.sets.fin and _key(origin) in s.register.qubits:
                rename[_key(origin)] = ("out",) + m.readable(pos)
        return QOutcome(prob, m.interpretation(s.tokens), s.register.rename(rename))


def _pick(ts: list[Transition], schedule, rng: random.Random | None) -> Transition:
    if rng is not None:
        return rng.choice(ts)
    if schedule == "last":
        return ts[-1]
    return ts[0]


def _rng(schedule) -> random.Random | None:
    if schedule in (None, "det", "last"):
        return None
    if isinstance(schedule, str) and schedule.startswith("seed:"):
        schedule = int(schedule[5:])
    if isinstance(schedule, int):
        return random.Random(schedule)
    raise ValueError(f"unknown schedule {schedule!r}")


def qstep(qn: QuantumNet, s: QMachineState, schedule="det",
          gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> list[tuple[float, QMachineState]]:
    """One scheduled transition from ``s``; empty when ``s`` is stuck."""
    qm = QMachine(qn, gates)
    ts = qm.enabled(s)
    if not ts:
        return []
    return qm.fire(s, _pick(ts, schedule, _rng(schedule)))


def qrun(qn: QuantumNet, schedule="det", init: QuantumRegister | None = None,
         gates: Mapping[str, UnitarySpec] = BUILTIN_GATES, max_steps: int = 1_000_000,
         machine: QMachine | None = None) -> list[tuple[float, QMachineState]]:
    """Explore the probability tree to stuck states.

    ``schedule`` is "det" (first enabled transition), "last", or a seed.
    """
    qm = machine or QMachine(qn, gates)
    rng = _rng(schedule)
    todo = [(1.0, qm.initial(init))]
    leaves = []
    steps = 0
    while todo:
        p, s = todo.pop()
        ts = qm.enabled(s)
        if not ts:
            leaves.append((p, s))
            continue
        steps += 1
        if steps > max_steps:
            raise MachineError(f"run exceeded {max_steps} steps")
        todo.extend((p * q, nxt) for q, nxt in qm.fire(s, _pick(ts, schedule, rng)))
    return leaves


def _merge(outcomes: list[QOutcome], tol: float = TOL) -> tuple[QOutcome, ...]:
    merged: list[QOutcome] = []
    for o in outcomes:
        for i, c in enumerate(merged):
            if c.injection == o.injection and c.register.allclose(o.register, tol):
                merged[i] = QOutcome(c.prob + o.prob, c.injection, c.register)
                break
        else:
            merged.append(o)
    return tuple(merged)


def qinterpret(qn: QuantumNet, init: QuantumRegister | None = None, schedule="det",
               gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> QInterpretation:
    qm = QMachine(qn, gates)
    leaves = qrun(qn, schedule, init, gates, machine=qm)
    return QInterpretation(_merge([qm.outcome(s, p) for p, s in leaves]))


def sample(qn: QuantumNet, shots: int, seed: int = 0, init: QuantumRegister | None = None,
           gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> list[QOutcome]:
    """Draw ``shots`` runs, choosing measurement outcomes at random."""
    rng = np.random.default_rng(seed)
    qm = QMachine(qn, gates)
    out = []
    for _ in range(shots):
        s = qm.initial(init)
        while True:
            ts = qm.enabled(s)
            if not ts:
                break
            branches = qm.fire(s, ts[0])
            probs = np.array([p for p, _ in branches])
            s = branches[int(rng.choice(len(branches), p=probs / probs.sum()))][1]
        out.append(qm.outcome(s, 1.0 / shots))
    return list(_merge(out))


__all__ = ["QMachineState", "QOutcome", "QInterpretation", "QMachine", "qstep", "qrun", "qinterpret", "sample"]
