"""First-order Trotter circuits for the dimer chain Hamiltonian.

One step of length ``dt`` is::

    U1 layer (on-site term)  ->  for each bond (j, j+1): XX block, YY block

The gate angles below were fixed by demanding exact equality with
``exp(-i theta P(x)P)`` rather than by reading printed sign conventions:

* on-site: ``exp(-i (w/2) Z dt)`` equals ``u1(w*dt)`` up to a global phase;
* XX: ``cx(j, j+1) . u3(2 theta, -pi/2, pi/2) on j . cx(j, j+1)``;
* YY: ``cx . cu3(2 theta, -pi/2, pi/2) . acu3(2 theta, pi/2, -pi/2) . cx``
  where both controlled rotations act on ``j`` and are controlled by ``j+1``.

``theta`` is the coupling angle ``lam*dt``; U3 uses half-angles, hence
the factor of two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .circuit import Circuit, GateOp
from .pauli import PauliSum, build_hamiltonian

HALF_PI = math.pi / 2

# frozen calibration: gate -> (theta scale, phi, lam)
CALIBRATION = {
    "u1_scale": 1.0,
    "xx_u3": (2.0, -HALF_PI, HALF_PI),
    "yy_cu3": (2.0, -HALF_PI, HALF_PI),
    "yy_acu3": (2.0, HALF_PI, -HALF_PI),
}


@dataclass(frozen=True)
class TrotterPlan:
    n_qubits: int
    omegas: tuple[float, ...]
    lam: float
    t: float
    n_steps: int = 1
    initial_layer: bool = True

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        if len(self.omegas) != self.n_qubits:
            raise ValueError(f"expected {self.n_qubits} omegas, got {len(self.omegas)}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")
        if not all(map(math.isfinite, (*self.omegas, self.lam, self.t))):
            raise ValueError("non-finite model parameter")

    @property
    def dt(self) -> float:
        return self.t / self.n_steps

    def hamiltonian(self) -> PauliSum:
        return build_hamiltonian(self.n_qubits, self.omegas, self.lam)


def _check_bond(n_qubits: int, q: int) -> None:
    if not 0 <= q < n_qubits - 1:
        raise ValueError(f"bond ({q}, {q + 1}) does not exist on {n_qubits} qubits")


def build_h1_layer(plan: TrotterPlan) -> Circuit:
    c = Circuit(plan.n_qubits)
    for j, w in enumerate(plan.omegas):
        c = c.u1(CALIBRATION["u1_scale"] * w * plan.dt, j)
    return c


def _xx_ops(q: int, theta: float) -> list[GateOp]:
    scale, phi, lam = CALIBRATION["xx_u3"]
    return [
        GateOp("cx", (q, q + 1)),
        GateOp("u3", (q,), (scale * theta, phi, lam)),
        GateOp("cx", (q, q + 1)),
    ]


def _yy_ops(q: int, theta: float) -> list[GateOp]:
    s1, phi1, lam1 = CALIBRATION["yy_cu3"]
    s2, phi2, lam2 = CALIBRATION["yy_acu3"]
    return [
        GateOp("cx", (q, q + 1)),
        GateOp("cu3", (q, q + 1), (s1 * theta, phi1, lam1)),
        GateOp("acu3", (q, q + 1), (s2 * theta, phi2, lam2)),
        GateOp("cx", (q, q + 1)),
    ]


def build_xx_block(n_qubits: int, q: int, theta: float) -> Circuit:
    """Circuit equal to ``exp(-i theta X_q X_q+1)``."""
    _check_bond(n_qubits, q)
    return Circuit(n_qubits, tuple(_xx_ops(q, theta)))


def build_yy_block(n_qubits: int, q: int, theta: float) -> Circuit:
    """Circuit equal to ``exp(-i theta Y_q Y_q+1)``."""
    _check_bond(n_qubits, q)
    return Circuit(n_qubits, tuple(_yy_ops(q, theta)))


def cancel_cnot_pairs(ops: Sequence[GateOp]) -> list[GateOp]:
    """Drop adjacent identical CNOTs (they multiply to the identity)."""
    out: list[GateOp] = []
    for op in ops:
        if out and op.name == "cx" and out[-1] == op:
            out.pop()
        else:
            out.append(op)
    return out


def build_step(plan: TrotterPlan, cancel: bool = True) -> Circuit:
    theta = plan.lam * plan.dt
    ops = list(build_h1_layer(plan).ops)
    for q in range(plan.n_qubits - 1):
        bond = _xx_ops(q, theta) + _yy_ops(q, theta)
        ops += cancel_cnot_pairs(bond) if cancel else bond
    return Circuit(plan.n_qubits, tuple(ops))


def build_full_circuit(plan: TrotterPlan, cancel: bool = True) -> Circuit:
    """Optional Hadamard on qubit 0, then ``n_steps`` first-order Trotter steps."""
    step = build_step(plan, cancel=cancel)
    ops: list[GateOp] = [GateOp("h", (0,))] if plan.initial_layer else []
    ops += list(step.ops) * plan.n_steps
    return Circuit(plan.n_qubits, tuple(ops))


def global_phase(plan: TrotterPlan) -> float:
    """Phase ``a`` with ``unitary(build_evolution(plan)) == e^{ia} * product formula``.

    Each ``u1(w*dt)`` equals ``e^{i w dt/2} exp(-i (w/2) Z dt)``.
    """
    return 0.5 * sum(plan.omegas) * plan.dt * plan.n_steps


def build_evolution(plan: TrotterPlan, cancel: bool = True) -> Circuit:
    """Trotter steps only, without the preparation layer."""
    step = build_step(plan, cancel=cancel)
    return Circuit(plan.n_qubits, step.ops * plan.n_steps)
