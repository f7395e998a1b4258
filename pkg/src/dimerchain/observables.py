"""Basis-rotation measurements and Pauli expectation estimates.

A Pauli string is measured by rotating every non-identity qubit into the
Z basis (``H`` for X, ``S^dag`` then ``H`` for Y) and averaging the parity
of the measured bits over the string's support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import Circuit
from .pauli import PauliString, PauliSum
from .statevector import ShotResult, StateVector, make_rng, probabilities, run, sample_probabilities
from .trotter import TrotterPlan, build_full_circuit


@dataclass(frozen=True)
class MeasurementSetting:
    """Measurement basis per qubit; ``bases[j]`` is the basis of qubit ``j``."""

    bases: tuple[str, ...]

    def __post_init__(self):
        bases = tuple(b.upper() for b in self.bases)
        if not bases or set(bases) - {"X", "Y", "Z"}:
            raise ValueError(f"bad measurement setting {self.bases!r}")
        object.__setattr__(self, "bases", bases)

    @classmethod
    def from_label(cls, label: str) -> MeasurementSetting:
        return cls(tuple(reversed(label)))

    @classmethod
    def for_pauli(cls, string: PauliString) -> MeasurementSetting:
        return cls(tuple("Z" if p == "I" else p for p in string.ops))

    @property
    def n_qubits(self) -> int:
        return len(self.bases)

    @property
    def label(self) -> str:
        return "".join(reversed(self.bases))

    def measures(self, string: PauliString) -> bool:
        """True if counts in this setting determine ``<string>``."""
        return all(p == "I" or p == b for p, b in zip(string.ops, self.bases))


def basis_rotation_circuit(setting: MeasurementSetting) -> Circuit:
    c = Circuit(setting.n_qubits)
    for q, b in enumerate(setting.bases):
        if b == "X":
            c = c.h(q)
        elif b == "Y":
            c = c.sdg(q).h(q)
    return c


def rotated_probabilities(state: StateVector, setting: MeasurementSetting) -> np.ndarray:
    """Exact Z-basis outcome distribution after the basis rotation."""
    return probabilities(run(state.copy(), basis_rotation_circuit(setting)))


def _parity_signs(string: PauliString) -> np.ndarray:
    idx = np.arange(1 << string.n_qubits)
    mask = sum(1 << q for q in string.support)
    parity = np.array([bin(i & mask).count("1") & 1 for i in idx])
    return 1 - 2 * parity


def pauli_expectation_from_probabilities(probs: np.ndarray, string: PauliString) -> float:
    return float(np.dot(_parity_signs(string), probs))


def pauli_expectation_from_counts(counts: ShotResult, string: PauliString) -> float:
    if counts.shots < 1 or not counts.counts:
        raise ValueError("empty counts")
    if counts.n_qubits != string.n_qubits:
        raise ValueError("counts and Pauli string have different qubit counts")
    mask = sum(1 << q for q in string.support)
    total = 0
    for label, k in counts.counts.items():
        total += k * (1 - 2 * (bin(int(label, 2) & mask).count("1") & 1))
    return total / counts.shots


def parity_sigma(mean: float, shots: int) -> float:
    """Standard error of a +-1 parity estimate."""
    return math.sqrt(max(0.0, 1.0 - mean * mean) / shots)


def estimate_pauli_sum(h: PauliSum, state: StateVector, shots: int, seed) -> float:
    """Shot-based ``<H>``: one sampled setting per distinct measurement basis."""
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    cache: dict[MeasurementSetting, ShotResult] = {}
    total = 0.0
    for c, s in h.terms:
        if not s.support:
            total += c
            continue
        setting = MeasurementSetting.for_pauli(s)
        if setting not in cache:
            probs = rotated_probabilities(state, setting)
            cache[setting] = sample_probabilities(probs, shots, rng, state.n_qubits)
        total += c * pauli_expectation_from_counts(cache[setting], s)
    return total


def bond_strings(n_qubits: int, pauli: str) -> list[PauliString]:
    out = []
    for j in range(n_qubits - 1):
        ops = ["I"] * n_qubits
        ops[j] = ops[j + 1] = pauli
        out.append(PauliString(tuple(ops)))
    return out


def bond_average(probs_or_counts, n_qubits: int, pauli: str) -> float:
    strings = bond_strings(n_qubits, pauli)
    if isinstance(probs_or_counts, ShotResult):
        vals = [pauli_expectation_from_counts(probs_or_counts, s) for s in strings]
    else:
        vals = [pauli_expectation_from_probabilities(probs_or_counts, s) for s in strings]
    return float(np.mean(vals))


@dataclass(frozen=True)
class CorrelatorRow:
    lambda_t: float
    xx_exact: float
    yy_exact: float
    xx_shots: float | None = None
    yy_shots: float | None = None


def correlator_point(plan: TrotterPlan, shots: int = 0, seed: int = 0, index: int = 0) -> CorrelatorRow:
    """Nearest-neighbour ``<XX>`` and ``<YY>`` (bond averaged) after the Trotter circuit."""
    if plan.n_qubits < 2:
        raise ValueError("correlators need at least two qubits")
    n = plan.n_qubits
    state = run(StateVector.zeros(n), build_full_circuit(plan))
    row = {}
    for p in ("X", "Y"):
        probs = rotated_probabilities(state, MeasurementSetting((p,) * n))
        row[p] = bond_average(probs, n, p)
        if shots:
            counts = sample_probabilities(probs, shots, make_rng(seed, index, ord(p)), n)
            row[p + "s"] = bond_average(counts, n, p)
    return CorrelatorRow(
        plan.lam * plan.t, row["X"], row["Y"], row.get("Xs"), row.get("Ys")
    )


def correlator_sweep(
    template: TrotterPlan, lambda_t: Sequence[float], shots: int = 0, seed: int = 0
) -> list[CorrelatorRow]:
    """Evaluate :func:`correlator_point` with ``lam = lambda_t / t`` for each grid value."""
    if template.t == 0:
        raise ValueError("template needs a nonzero total time to map lambda*t onto lambda")
    rows = []
    for i, lt in enumerate(lambda_t):
        plan = replace(template, lam=lt / template.t)
        rows.append(correlator_point(plan, shots, seed, i))
    return rows


def expectations_by_setting(
    counts: Mapping[MeasurementSetting, ShotResult | np.ndarray], strings: Iterable[PauliString]
) -> dict[PauliString, float]:
    """Estimate each string from every compatible setting and average."""
    out = {}
    for s in strings:
        vals = []
        for setting, data in counts.items():
            if setting.measures(s):
                if isinstance(data, ShotResult):
                    vals.append(pauli_expectation_from_counts(data, s))
                else:
                    vals.append(pauli_expectation_from_probabilities(np.asarray(data), s))
        if not vals:
            raise ValueError(f"no measurement setting determines {s}")
        out[s] = float(np.mean(vals))
    return out
