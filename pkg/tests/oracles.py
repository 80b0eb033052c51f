"""Independent numeric oracles: plain numpy state vectors, no package code."""

import numpy as np

S = 1 / np.sqrt(2)
H = np.array([[S, S], [S, -S]])
X = np.array([[0, 1], [1, 0]])
I2 = np.eye(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
KET0 = np.array([1.0, 0.0])


def bell_state() -> np.ndarray:
    return CNOT @ np.kron(H @ KET0, KET0)


def outcome_probs(state: np.ndarray, qubit: int, n: int) -> tuple[float, float]:
    t = np.abs(state.reshape([2] * n)) ** 2
    t = np.moveaxis(t, qubit, 0).reshape(2, -1).sum(axis=1)
    return float(t[0]), float(t[1])
