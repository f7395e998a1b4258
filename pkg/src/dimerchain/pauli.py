"""Pauli strings, weighted Pauli sums and the dimer spin-chain Hamiltonian.

Qubit 0 is the least significant bit of a basis-state index everywhere in
this package. Pauli labels are written like bit strings: the rightmost
character acts on qubit 0, so ``"XZ"`` means ``X_1 Z_0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_DENSE_QUBITS = 12

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class CapacityError(ValueError):
    """Raised when a dense representation would exceed the size guard."""


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis; ``ops[j]`` acts on qubit ``j``."""

    ops: tuple[str, ...]

    def __post_init__(self):
        ops = tuple(self.ops)
        if len(ops) < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        bad = [p for p in ops if p not in PAULI_MATRICES]
        if bad:
            raise ValueError(f"unknown Pauli symbols {bad!r}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        return cls(tuple(reversed(label.upper())))

    @classmethod
    def single(cls, n_qubits: int, qubit: int, op: str) -> PauliString:
        ops = ["I"] * n_qubits
        ops[qubit] = op
        return cls(tuple(ops))

    @property
    def n_qubits(self) -> int:
        return len(self.ops)

    @property
    def label(self) -> str:
        return "".join(reversed(self.ops))

    @property
    def support(self) -> tuple[int, ...]:
        """Qubits carrying a non-identity factor."""
        return tuple(j for j, p in enumerate(self.ops) if p != "I")

    def to_matrix(self) -> np.ndarray:
        _check_dense(self.n_qubits)
        out = np.ones((1, 1), dtype=complex)
        # kron(A, B) puts A on the more significant index, so highest qubit goes first
        for p in reversed(self.ops):
            out = np.kron(out, PAULI_MATRICES[p])
        return out

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Return ``P|psi>`` without forming the dense matrix."""
        n = self.n_qubits
        idx = np.arange(1 << n)
        flip = 0
        phase = np.ones(1 << n, dtype=complex)
        for q, p in enumerate(self.ops):
            if p == "I":
                continue
            bit = (idx >> q) & 1
            if p in ("X", "Y"):
                flip |= 1 << q
            if p == "Z":
                phase *= 1 - 2 * bit
            elif p == "Y":
                # Y|0> = i|1>, Y|1> = -i|0>; phase is taken from the source bit
                phase *= 1j * (1 - 2 * bit)
        out = np.empty_like(psi)
        out[idx ^ flip] = phase * psi
        return out

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings on a common register."""

    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        terms = tuple((float(c), s) for c, s in self.terms)
        if not terms:
            raise ValueError("a PauliSum needs at least one term")
        n = terms[0][1].n_qubits
        for c, s in terms:
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient {c!r} on {s}")
            if s.n_qubits != n:
                raise ValueError("all Pauli strings must share the same qubit count")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_list(cls, items: Iterable[tuple[float, str]]) -> PauliSum:
        return cls(tuple((c, PauliString.from_label(lbl)) for c, lbl in items))

    @property
    def n_qubits(self) -> int:
        return self.terms[0][1].n_qubits

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def to_list(self) -> list[tuple[float, str]]:
        return [(c, s.label) for c, s in self.terms]

    def to_dense_matrix(self) -> np.ndarray:
        return to_dense_matrix(self)

    def expectation(self, psi) -> float:
        return expectation_on_state(self, psi)


def _check_dense(n_qubits: int, limit: int = MAX_DENSE_QUBITS) -> None:
    if n_qubits > limit:
        raise CapacityError(
            f"dense matrix for {n_qubits} qubits exceeds the {limit}-qubit guard"
        )


def build_hamiltonian(n_qubits: int, omegas: Sequence[float], lam: float) -> PauliSum:
    """Dimer chain Hamiltonian ``sum_j (w_j/2) Z_j + lam * sum_j (X_j X_j+1 + Y_j Y_j+1)``.

    The hopping weight is exactly ``lam`` on each of XX and YY, so that a
    Trotter block with rotation angle ``lam*dt`` reproduces ``exp(-i H_2 dt)``.
    Coupling terms are listed bond by bond (XX then YY) after all Z terms.
    """
    if n_qubits < 1:
        raise ValueError(f"need at least one qubit, got {n_qubits}")
    omegas = [float(w) for w in omegas]
    if len(omegas) != n_qubits:
        raise ValueError(f"expected {n_qubits} on-site energies, got {len(omegas)}")
    terms: list[tuple[float, PauliString]] = []
    for j, w in enumerate(omegas):
        terms.append((w / 2.0, PauliString.single(n_qubits, j, "Z")))
    for j in range(n_qubits - 1):
        for p in ("X", "Y"):
            ops = ["I"] * n_qubits
            ops[j] = ops[j + 1] = p
            terms.append((float(lam), PauliString(tuple(ops))))
    return PauliSum(tuple(terms))


def to_dense_matrix(h: PauliSum) -> np.ndarray:
    _check_dense(h.n_qubits)
    dim = 1 << h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for c, s in h.terms:
        out += c * s.to_matrix()
    return out


def expectation_on_state(h: PauliSum, psi) -> float:
    """``<psi|H|psi>`` evaluated term by term on the amplitude vector."""
    amps = np.asarray(getattr(psi, "amplitudes", psi), dtype=complex)
    if amps.shape != (1 << h.n_qubits,):
        raise ValueError(
            f"state of shape {amps.shape} does not match a {h.n_qubits}-qubit operator"
        )
    total = 0j
    for c, s in h.terms:
        total += c * np.vdot(amps, s.apply(amps))
    if abs(total.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {total.imag:.3e}")
    return float(total.real)
