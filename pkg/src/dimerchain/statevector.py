"""Dense state-vector engine.

Amplitude index ``i`` has qubit ``q`` in bit ``q`` of ``i`` (qubit 0 least
significant); bit-string labels print qubit 0 rightmost. Gates are applied
in place on strided views of the amplitude array, one pair (or quartet) of
sub-arrays per target qubit, so no ``2^n x 2^n`` matrix is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GateOp

NORM_ATOL = 1e-10
RNG_NAME = "numpy.random.PCG64"


def basis_label(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def make_rng(seed, *extra: int) -> np.random.Generator:
    """PCG64 generator keyed on ``seed`` plus optional stream indices."""
    key = [int(seed), *map(int, extra)] if extra else int(seed)
    return np.random.Generator(np.random.PCG64(key))


@dataclass
class ShotResult:
    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to the number of shots")

    @property
    def n_qubits(self) -> int:
        return len(next(iter(self.counts)))

    def frequencies(self) -> np.ndarray:
        """Empirical distribution as a ``2^n`` vector indexed like amplitudes."""
        out = np.zeros(1 << self.n_qubits)
        for label, k in self.counts.items():
            out[int(label, 2)] = k
        return out / self.shots


class StateVector:
    """Mutable register state; one owner at a time."""

    def __init__(self, amplitudes, *, copy: bool = True):
        amps = np.array(amplitudes, dtype=complex, copy=copy)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a flat vector")
        n = amps.size.bit_length() - 1
        if n < 1 or amps.size != 1 << n:
            raise ValueError(f"amplitude count {amps.size} is not a power of two >= 2")
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def zeros(cls, n_qubits: int) -> StateVector:
        return init_basis(n_qubits, "0" * n_qubits)

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def apply(self, op: GateOp) -> StateVector:
        return apply(self, op)

    def run(self, circuit: Circuit) -> StateVector:
        return run(self, circuit)

    def probabilities(self) -> np.ndarray:
        return probabilities(self)

    def sample(self, shots: int, seed) -> ShotResult:
        return sample(self, shots, seed)

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def init_basis(n_qubits: int, label: str) -> StateVector:
    if len(label) != n_qubits or set(label) - {"0", "1"}:
        raise ValueError(f"label {label!r} is not a {n_qubits}-bit string")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[int(label, 2)] = 1.0
    return StateVector(amps, copy=False)


def _split(amps: np.ndarray, n: int, q: int) -> np.ndarray:
    # shape (high, 2, low): axis 1 is the bit of qubit q
    return amps.reshape(1 << (n - q - 1), 2, 1 << q)


def _apply_1q(amps: np.ndarray, n: int, m: np.ndarray, q: int) -> None:
    v = _split(amps, n, q)
    a0 = v[:, 0, :]
    a1 = v[:, 1, :]
    t0 = m[0, 0] * a0 + m[0, 1] * a1
    a1 *= m[1, 1]
    a1 += m[1, 0] * a0
    a0[...] = t0


def _apply_2q(amps: np.ndarray, n: int, m: np.ndarray, qa: int, qb: int) -> None:
    t = amps.reshape((2,) * n)
    axis_a, axis_b = n - 1 - qa, n - 1 - qb

    def view(ba, bb):
        idx = [slice(None)] * n
        # length-1 slices keep a writable view even when n == 2
        idx[axis_a] = slice(ba, ba + 1)
        idx[axis_b] = slice(bb, bb + 1)
        return t[tuple(idx)]

    views = [view(0, 0), view(0, 1), view(1, 0), view(1, 1)]
    # skip structural zeros: cx and controlled gates are mostly zero
    new = [
        sum((m[i, j] * views[j] for j in range(4) if m[i, j] != 0), np.zeros_like(views[i]))
        for i in range(4)
    ]
    for v, w in zip(views, new):
        v[...] = w


def apply(state: StateVector, op: GateOp) -> StateVector:
    n = state.n_qubits
    if max(op.qubits) >= n:
        raise ValueError(f"{op.name} on {op.qubits} is out of range for {n} qubits")
    m = op.matrix
    if len(op.qubits) == 1:
        _apply_1q(state.amplitudes, n, m, op.qubits[0])
    else:
        _apply_2q(state.amplitudes, n, m, *op.qubits)
    return state


def run(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"{circuit.n_qubits}-qubit circuit applied to a {state.n_qubits}-qubit state"
        )
    for op in circuit.ops:
        apply(state, op)
    return state


def simulate(circuit: Circuit, initial: StateVector | str | None = None) -> StateVector:
    """Run ``circuit`` on a fresh copy of ``initial`` (default ``|0...0>``)."""
    if initial is None:
        state = StateVector.zeros(circuit.n_qubits)
    elif isinstance(initial, str):
        state = init_basis(circuit.n_qubits, initial)
    else:
        state = initial.copy()
    return run(state, circuit)


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def sample_probabilities(probs: np.ndarray, shots: int, seed, n_qubits: int | None = None) -> ShotResult:
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    p = p / p.sum()
    if n_qubits is None:
        n_qubits = p.size.bit_length() - 1
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    draws = rng.multinomial(shots, p)
    counts = {basis_label(i, n_qubits): int(k) for i, k in enumerate(draws) if k}
    return ShotResult(counts, shots)


def sample(state: StateVector, shots: int, seed) -> ShotResult:
    """Multinomial draw of ``shots`` outcomes from the Born distribution."""
    return sample_probabilities(probabilities(state), shots, seed, state.n_qubits)
