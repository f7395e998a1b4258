"""Shared fixtures and helpers for the test suite."""
import numpy as np
import pytest

from dimerchain.circuit import Circuit, GateOp
from dimerchain.gates import GATES
from dimerchain.statevector import StateVector


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v / np.linalg.norm(v))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    dim = 1 << n
    k = rank or dim
    a = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    m = a @ a.conj().T
    return m / np.trace(m).real


def random_circuit(n: int, depth: int, rng: np.random.Generator) -> Circuit:
    """Random circuit drawing uniformly from the whole gate library."""
    names = [g for g, (nq, _, _) in GATES.items() if nq <= n]
    ops = []
    for _ in range(depth):
        name = names[rng.integers(len(names))]
        nq, npar, _ = GATES[name]
        qubits = tuple(int(q) for q in rng.choice(n, size=nq, replace=False))
        params = tuple(float(x) for x in rng.uniform(-2 * np.pi, 2 * np.pi, npar))
        ops.append(GateOp(name, qubits, params))
    return Circuit(n, tuple(ops))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({detail})"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
