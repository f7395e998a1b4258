"""Exact dynamics and spectra from dense Hermitian eigendecomposition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import CapacityError, PauliSum, build_hamiltonian, to_dense_matrix
from .statevector import StateVector

MAX_EXACT_QUBITS = 10
MAX_TROTTER_ERROR_QUBITS = 8


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def first_excited_energy(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def ground_state(self) -> np.ndarray:
        return self.eigenvectors[:, 0]


def _guard(h: PauliSum, limit: int) -> None:
    if h.n_qubits > limit:
        raise CapacityError(f"{h.n_qubits} qubits exceeds the {limit}-qubit exact-solver guard")


def spectrum(h: PauliSum) -> Spectrum:
    _guard(h, MAX_EXACT_QUBITS)
    vals, vecs = np.linalg.eigh(to_dense_matrix(h))
    return Spectrum(vals, vecs)


def evolution_operator(h: PauliSum, t: float) -> np.ndarray:
    """``exp(-i H t)`` as a dense matrix."""
    sp = spectrum(h)
    v = sp.eigenvectors
    return (v * np.exp(-1j * sp.eigenvalues * t)) @ v.conj().T


def evolve_exact(h: PauliSum, t: float, psi0) -> StateVector:
    amps = np.asarray(getattr(psi0, "amplitudes", psi0), dtype=complex)
    if amps.shape != (1 << h.n_qubits,):
        raise ValueError("state does not match the operator dimension")
    _guard(h, MAX_EXACT_QUBITS)
    sp = spectrum(h)
    v = sp.eigenvectors
    coeffs = v.conj().T @ amps
    return StateVector(v @ (np.exp(-1j * sp.eigenvalues * t) * coeffs), copy=False)


def trotter_error(h: PauliSum, t: float, n_steps: int) -> float:
    """Spectral-norm distance between the Trotter circuit and ``exp(-iHt)``.

    The global phase dropped by the u1 gates is restored before comparing,
    otherwise the distance would not vanish as ``n_steps`` grows.
    ``h`` must have the dimer-chain form produced by :func:`build_hamiltonian`.
    """
    from .trotter import TrotterPlan, build_evolution, global_phase

    _guard(h, MAX_TROTTER_ERROR_QUBITS)
    omegas, lam = chain_parameters(h)
    plan = TrotterPlan(h.n_qubits, omegas, lam, t, n_steps, initial_layer=False)
    u = build_evolution(plan).to_unitary() * np.exp(-1j * global_phase(plan))
    return float(np.linalg.norm(u - evolution_operator(h, t), ord=2))


def chain_parameters(h: PauliSum) -> tuple[list[float], float]:
    """Recover ``(omegas, lam)`` from a dimer-chain Hamiltonian."""
    n = h.n_qubits
    omegas = [0.0] * n
    lams = set()
    for c, s in h.terms:
        sup = s.support
        kinds = {s.ops[q] for q in sup}
        if len(sup) == 1 and kinds == {"Z"}:
            omegas[sup[0]] += 2.0 * c
        elif len(sup) == 2 and sup[1] == sup[0] + 1 and len(kinds) == 1 and kinds <= {"X", "Y"}:
            lams.add(c)
        else:
            raise ValueError(f"term {c}*{s} is not of dimer-chain form")
    if len(lams) > 1:
        raise ValueError(f"non-uniform coupling {sorted(lams)}")
    lam = lams.pop() if lams else 0.0
    if build_hamiltonian(n, omegas, lam).to_list() != h.to_list():
        raise ValueError("Hamiltonian is not of dimer-chain form")
    return omegas, lam
