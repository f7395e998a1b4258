"""Linear-inversion state tomography, fidelity and depolarizing noise."""
from __future__ import annotations

import itertools
from typing import Mapping

import numpy as np

from .observables import MeasurementSetting, basis_rotation_circuit, expectations_by_setting
from .pauli import PauliString
from .statevector import ShotResult, StateVector, sample_probabilities

DM_ATOL = 1e-8
EIG_CUTOFF = 1e-14


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite ``2^n x 2^n`` matrix."""

    def __init__(self, data, *, validate: bool = True):
        m = np.array(data, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        n = m.shape[0].bit_length() - 1
        if n < 1 or m.shape[0] != 1 << n:
            raise ValueError(f"dimension {m.shape[0]} is not a power of two >= 2")
        self.n_qubits = n
        self.data = m
        if validate:
            check_density(m)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits})"


def check_density(m: np.ndarray, atol: float = DM_ATOL) -> None:
    if not np.allclose(m, m.conj().T, atol=atol, rtol=0):
        raise ValueError("matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1) > atol:
        raise ValueError(f"trace is {tr.real:.3e}, expected 1")
    lo = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
    if lo < -atol:
        raise ValueError(f"matrix has negative eigenvalue {lo:.3e}")


def density_from_state(psi) -> DensityMatrix:
    amps = np.asarray(getattr(psi, "amplitudes", psi), dtype=complex)
    return DensityMatrix(np.outer(amps, amps.conj()))


def all_settings(n_qubits: int) -> list[MeasurementSetting]:
    return [MeasurementSetting(b) for b in itertools.product("XYZ", repeat=n_qubits)]


def all_pauli_strings(n_qubits: int) -> list[PauliString]:
    return [PauliString(p) for p in itertools.product("IXYZ", repeat=n_qubits)]


def project_psd(m: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues of the Hermitian part and renormalize the trace."""
    h = (m + m.conj().T) / 2
    vals, vecs = np.linalg.eigh(h)
    vals = np.clip(vals, 0.0, None)
    if vals.sum() <= 0:
        raise ValueError("reconstruction has no positive part")
    vals = vals / vals.sum()
    return (vecs * vals) @ vecs.conj().T


def tomographic_reconstruction(
    counts: Mapping[MeasurementSetting, ShotResult | np.ndarray],
) -> DensityMatrix:
    """Linear inversion over all ``4^n`` Pauli strings, then PSD projection.

    ``counts`` maps each of the ``3^n`` product settings to sampled counts
    or to an exact outcome distribution (the infinite-shot limit). Strings
    with identity factors are averaged over every setting that measures them.
    """
    if not counts:
        raise ValueError("no measurement data")
    n = next(iter(counts)).n_qubits
    missing = [s.label for s in all_settings(n) if s not in counts]
    if missing:
        raise ValueError(f"missing measurement settings: {', '.join(missing)}")
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=complex)
    for s, val in expectations_by_setting(counts, all_pauli_strings(n)).items():
        rho += val * s.to_matrix()
    rho /= dim
    return DensityMatrix(project_psd(rho))


def settings_probabilities(rho, setting: MeasurementSetting) -> np.ndarray:
    """Outcome distribution of measuring ``rho`` (matrix or state) in ``setting``."""
    u = basis_rotation_circuit(setting).to_unitary()
    if isinstance(rho, StateVector):
        return np.abs(u @ rho.amplitudes) ** 2
    m = np.asarray(rho)
    return np.clip(np.real(np.diag(u @ m @ u.conj().T)), 0.0, None)


def measure_all_settings(rho, shots: int = 0, rng=None) -> dict[MeasurementSetting, ShotResult | np.ndarray]:
    """Simulated tomography data; ``shots=0`` returns exact distributions."""
    n = rho.n_qubits
    out = {}
    for s in all_settings(n):
        p = settings_probabilities(rho, s)
        out[s] = sample_probabilities(p, shots, rng, n) if shots else p
    return out


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    # roundoff eigenvalues (~1e-17) would otherwise turn into ~1e-9 after sqrt
    vals = np.where(vals > EIG_CUTOFF * max(vals.max(), 1.0), vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.data
    m = np.asarray(rho, dtype=complex)
    check_density(m)
    return m


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` (not squared).

    Evaluated as the trace norm of ``sqrt(rho) sqrt(sigma)``, which is the
    same quantity but avoids square roots of roundoff-level eigenvalues.
    """
    a, b = _as_matrix(rho), _as_matrix(sigma)
    if a.shape != b.shape:
        raise ValueError("density matrices have different dimensions")
    f = float(np.linalg.svd(_psd_sqrt(a) @ _psd_sqrt(b), compute_uv=False).sum())
    if f > 1 + 1e-9:
        raise ValueError(f"fidelity {f} exceeds 1; inputs are not valid states")
    return min(max(f, 0.0), 1.0)


def trace_distance(rho, sigma) -> float:
    d = np.asarray(rho) - np.asarray(sigma)
    return float(0.5 * np.abs(np.linalg.eigvalsh((d + d.conj().T) / 2)).sum())


def depolarize(rho, p: float) -> DensityMatrix:
    """``(1 - p) rho + p I / 2^n``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    m = _as_matrix(rho)
    dim = m.shape[0]
    return DensityMatrix((1 - p) * m + p * np.eye(dim) / dim, validate=False)
