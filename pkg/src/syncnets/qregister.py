"""State vectors over named qubit wires.

Wires are kept sorted; the k-th sorted wire is tensor axis k and the most
significant bit of the basis index.  Gate matrices use the same convention
for their own argument list: the first listed wire is most significant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

TOL = 1e-9


class RegisterError(ValueError):
    pass


class DuplicateWire(RegisterError):
    pass


class UnknownWire(RegisterError):
    pass


class ArityMismatch(RegisterError):
    pass


class ZeroProbabilityBranch(RegisterError):
    pass


@dataclass(frozen=True)
class UnitarySpec:
    name: str
    arity: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        dim = 2 ** self.arity
        if m.shape != (dim, dim):
            raise ArityMismatch(f"gate {self.name}: matrix shape {m.shape}, expected {(dim, dim)}")
        if not np.allclose(m.conj().T @ m, np.eye(dim), atol=TOL):
            raise RegisterError(f"gate {self.name} is not unitary")


_S = 1 / np.sqrt(2)

BUILTIN_GATES: dict[str, UnitarySpec] = {
    g.name: g
    for g in [
        UnitarySpec("I", 1, np.eye(2)),
        UnitarySpec("X", 1, [[0, 1], [1, 0]]),
        UnitarySpec("H", 1, [[_S, _S], [_S, -_S]]),
        UnitarySpec("Z", 1, [[1, 0], [0, -1]]),
        UnitarySpec("CNOT", 2, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
        UnitarySpec("SWAP", 2, [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
    ]
}


def load_gates(path: str | Path, base: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> dict[str, UnitarySpec]:
    """Read user gates from JSON (one object or a list of {name, arity, matrix})."""
    raw = json.loads(Path(path).read_text())
    if isinstance(raw, dict):
        raw = [raw]
    table = dict(base)
    for g in raw:
        m = np.array([[complex(re, im) for re, im in row] for row in g["matrix"]])
        table[g["name"]] = UnitarySpec(g["name"], int(g["arity"]), m)
    return table


def gate_arities(table: Mapping[str, UnitarySpec]) -> dict[str, int]:
    return {k: g.arity for k, g in table.items()}


class QuantumRegister:
    """Immutable normalized state over sorted wire names."""

    __slots__ = ("qubits", "_t")

    def __init__(self, qubits: Iterable[Hashable] = (), amplitudes=None):
        qubits = tuple(qubits)
        order = sorted(range(len(qubits)), key=lambda i: qubits[i])
        n = len(qubits)
        if amplitudes is None:
            t = np.zeros((2,) * n, dtype=complex)
            t[(0,) * n] = 1
        else:
            t = np.asarray(amplitudes, dtype=complex).reshape((2,) * n)
        if order != list(range(n)):
            t = np.transpose(t, order)
            qubits = tuple(qubits[i] for i in order)
        if len(set(qubits)) != n:
            raise DuplicateWire(f"repeated wire in {qubits}")
        self.qubits = qubits
        self._t = t

    @classmethod
    def empty(cls) -> "QuantumRegister":
        return cls((), np.ones((), dtype=complex))

    @classmethod
    def basis(cls, bits: Mapping[Hashable, int]) -> "QuantumRegister":
        qubits = tuple(sorted(bits))
        t = np.zeros((2,) * len(qubits), dtype=complex)
        t[tuple(bits[q] for q in qubits)] = 1
        return cls(qubits, t)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._t.reshape(-1).copy()

    @property
    def tensor(self) -> np.ndarray:
        return self._t

    def __len__(self) -> int:
        return len(self.qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self._t))

    def _axis(self, r) -> int:
        try:
            return self.qubits.index(r)
        except ValueError:
            raise UnknownWire(f"no wire {r!r} in {self.qubits}") from None

    def fresh(self, r) -> "QuantumRegister":
        if r in self.qubits:
            raise DuplicateWire(f"wire {r!r} already present")
        zero = np.array([1, 0], dtype=complex)
        return QuantumRegister(self.qubits + (r,), np.multiply.outer(self._t, zero))

    def tensor_with(self, other: "QuantumRegister") -> "QuantumRegister":
        if set(self.qubits) & set(other.qubits):
            raise DuplicateWire("registers share wires")
        return QuantumRegister(self.qubits + other.qubits, np.multiply.outer(self._t, other._t))

    def apply(self, u: UnitarySpec, wires: Sequence) -> "QuantumRegister":
        wires = list(wires)
        if len(wires) != u.arity:
            raise ArityMismatch(f"{u.name} takes {u.arity} wires, got {len(wires)}")
        if len(set(wires)) != len(wires):
            raise DuplicateWire(f"repeated wire in {wires}")
        axes = [self._axis(w) for w in wires]
        k = len(axes)
        moved = np.moveaxis(self._t, axes, range(k))
        shape = moved.shape
        out = (u.matrix @ moved.reshape(2 ** k, -1)).reshape(shape)
        return QuantumRegister(self.qubits, np.moveaxis(out, range(k), axes))

    def prob(self, r, b: int) -> float:
        ax = self._axis(r)
        part = np.take(self._t, b, axis=ax)
        return float(np.sum(np.abs(part) ** 2))

    def project(self, r, b: int) -> "QuantumRegister":
        p = self.prob(r, b)
        if p <= 1e-12:
            raise ZeroProbabilityBranch(f"outcome {b} on {r!r} has probability {p}")
        ax = self._axis(r)
        part = np.take(self._t, b, axis=ax) / np.sqrt(p)
        rest = self.qubits[:ax] + self.qubits[ax + 1:]
        return QuantumRegister(rest, part)

    def rename(self, mapping: Mapping) -> "QuantumRegister":
        return QuantumRegister(tuple(mapping.get(q, q) for q in self.qubits), self._t)

    def reorder(self, qubits: Sequence) -> np.ndarray:
        """Amplitude vector with axes in the given wire order."""
        axes = [self._axis(q) for q in qubits]
        if len(axes) != len(self.qubits):
            raise UnknownWire("reorder must list every wire")
        return np.transpose(self._t, axes).reshape(-1)

    def allclose(self, other: "QuantumRegister", tol: float = TOL) -> bool:
        return self.qubits == other.qubits and np.allclose(self._t, other._t, atol=tol, rtol=0)

    def basis_bits(self, tol: float = TOL) -> dict | None:
        """The classical assignment if the state is a basis state (up to phase)."""
        flat = self._t.reshape(-1)
        i = int(np.argmax(np.abs(flat)))
        if abs(abs(flat[i]) - 1) > tol:
            return None
        n = len(self.qubits)
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        return dict(zip(self.qubits, bits))

    def __repr__(self) -> str:
        return f"QuantumRegister({list(self.qubits)}, {self.pretty()})"

    def pretty(self, tol: float = TOL) -> str:
        n = len(self.qubits)
        flat = self._t.reshape(-1)
        terms = []
        for i, a in enumerate(flat):
            if abs(a) <= tol:
                continue
            label = format(i, f"0{n}b") if n else ""
            terms.append(f"{_fmt_complex(a)}|{label}⟩")
        return " + ".join(terms) or "0"

    def to_json(self) -> dict:
        return {
            "qubits": [q if isinstance(q, str) else list(q) for q in self.qubits],
            "amplitudes": [[float(a.real), float(a.imag)] for a in self._t.reshape(-1)],
        }


def _fmt_complex(a: complex) -> str:
    a = complex(round(a.real, 9), round(a.imag, 9))
    if a.imag == 0:
        return f"{a.real:g}"
    if a.real == 0:
        return f"{a.imag:g}i"
    return f"({a.real:g}{a.imag:+g}i)"
