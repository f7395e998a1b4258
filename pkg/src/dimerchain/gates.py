"""Unitary matrices for the gate set used by the dimer-chain circuits.

Two-qubit matrices use the textbook ordering: the first tensor factor is
the more significant bit of the 4x4 index. ``cnot()`` therefore has its
control on the first factor, while ``controlled_u3`` follows the printed
form ``I (x) |0><0| + U3 (x) |1><1|`` with the control on the *second*
factor. :mod:`dimerchain.circuit` maps factors onto register qubits.
"""
from __future__ import annotations

import numpy as np

_SQRT1_2 = 1.0 / np.sqrt(2.0)

_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def hadamard() -> np.ndarray:
    return _H.copy()


def pauli_x() -> np.ndarray:
    return _X.copy()


def s_dagger() -> np.ndarray:
    return _SDG.copy()


def cnot() -> np.ndarray:
    return _CNOT.copy()


def u1(theta: float) -> np.ndarray:
    """Phase gate ``diag(1, e^{i theta})``."""
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    """Generic single-qubit rotation with Euler angles (theta, phi, lam)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def u3_dagger(theta: float, phi: float, lam: float) -> np.ndarray:
    return u3(theta, phi, lam).conj().T


def controlled_u3(theta: float, phi: float, lam: float, anti: bool = False) -> np.ndarray:
    """4x4 controlled U3; the rotated qubit is the first factor.

    ``anti=False`` applies U3 when the control (second factor) is ``|1>``,
    ``anti=True`` when it is ``|0>``.
    """
    u = u3(theta, phi, lam)
    eye = np.eye(2, dtype=complex)
    if anti:
        return np.kron(eye, _P1) + np.kron(u, _P0)
    return np.kron(eye, _P0) + np.kron(u, _P1)


def is_unitary(m: np.ndarray, atol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=atol, rtol=0))


# name -> (number of qubits, number of parameters, matrix factory)
GATES = {
    "h": (1, 0, hadamard),
    "x": (1, 0, pauli_x),
    "sdg": (1, 0, s_dagger),
    "u1": (1, 1, u1),
    "u3": (1, 3, u3),
    "u3dg": (1, 3, u3_dagger),
    "cx": (2, 0, cnot),
    "cu3": (2, 3, lambda t, p, l: controlled_u3(t, p, l, anti=False)),
    "acu3": (2, 3, lambda t, p, l: controlled_u3(t, p, l, anti=True)),
}


def gate_matrix(name: str, params=()) -> np.ndarray:
    try:
        n_qubits, n_params, factory = GATES[name]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}") from None
    if len(params) != n_params:
        raise ValueError(f"gate {name!r} takes {n_params} parameters, got {len(params)}")
    return factory(*params)
