"""Variational eigensolver with a layered U3 ansatz and an SPSA optimizer.

Excited states are found by deflation: the first excited energy minimizes
``<H> + beta * |<psi(theta)|psi_ground>|^2``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, GateOp
from .observables import estimate_pauli_sum
from .pauli import PauliSum, expectation_on_state
from .gates import cnot, u3
from .statevector import StateVector, _apply_1q, _apply_2q, make_rng

logger = logging.getLogger(__name__)


def derive_seed(seed: int, *stream: int) -> int:
    """Independent 32-bit seed for a sub-run keyed on ``stream``."""
    return int(np.random.SeedSequence([int(seed), *map(int, stream)]).generate_state(1)[0])


@dataclass(frozen=True)
class Ansatz:
    """Per layer: ``u3(theta, phi, lam)`` on every qubit, then a CNOT chain."""

    n_qubits: int
    n_layers: int
    entangler: bool = True

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_layers < 1:
            raise ValueError("ansatz needs at least one qubit and one layer")

    @property
    def n_params(self) -> int:
        return 3 * self.n_qubits * self.n_layers

    def circuit(self, params: Sequence[float]) -> Circuit:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"ansatz takes {self.n_params} parameters, got {params.size}")
        ops = []
        k = 0
        for _ in range(self.n_layers):
            for q in range(self.n_qubits):
                ops.append(GateOp("u3", (q,), tuple(params[k:k + 3])))
                k += 3
            if self.entangler:
                ops += [GateOp("cx", (q, q + 1)) for q in range(self.n_qubits - 1)]
        return Circuit(self.n_qubits, tuple(ops))


def ansatz_state(ansatz: Ansatz, params: Sequence[float]) -> StateVector:
    """Same state as running ``ansatz.circuit(params)``, without building the circuit."""
    params = np.asarray(params, dtype=float)
    if params.shape != (ansatz.n_params,):
        raise ValueError(f"ansatz takes {ansatz.n_params} parameters, got {params.size}")
    n = ansatz.n_qubits
    state = StateVector.zeros(n)
    amps = state.amplitudes
    cx = cnot()
    for layer in params.reshape(ansatz.n_layers, n, 3):
        for q, (theta, phi, lam) in enumerate(layer):
            _apply_1q(amps, n, u3(theta, phi, lam), q)
        if ansatz.entangler:
            for q in range(n - 1):
                _apply_2q(amps, n, cx, q, q + 1)
    return state


@dataclass(frozen=True)
class SpsaSchedule:
    """Gains ``a_k = a/(k+1+A)^alpha`` and ``c_k = c/(k+1)^gamma``."""

    a: float = 1.0
    c: float = 0.2
    A: float | None = None
    alpha: float = 0.602
    gamma: float = 0.101
    max_iterations: int = 300
    seed: int = 0
    track_best: bool = True

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0):
            raise ValueError("SPSA gains a and c must be positive")
        if not (0 < self.alpha < 1 and 0 < self.gamma < 1):
            raise ValueError("SPSA exponents must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    @property
    def stability(self) -> float:
        return 0.1 * self.max_iterations if self.A is None else self.A


@dataclass
class SpsaResult:
    x: np.ndarray
    fun: float
    trace: list[float]
    nfev_gradient: int
    nfev_tracking: int
    iterations: int


def spsa_minimize(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    schedule: SpsaSchedule,
) -> SpsaResult:
    """Minimize with two objective evaluations per iteration.

    With ``track_best`` the objective is also evaluated at each new iterate
    (counted in ``nfev_tracking``) and the best point seen is returned;
    otherwise the final iterate is returned and the trace holds the mean of
    the two perturbed evaluations.
    """
    rng = make_rng(schedule.seed)
    x = np.array(x0, dtype=float)
    A = schedule.stability

    def f(p, k):
        val = float(objective(p))
        if not math.isfinite(val):
            raise FloatingPointError(f"objective returned {val} at iteration {k} for parameters {p.tolist()}")
        return val

    trace: list[float] = []
    n_grad = n_track = 0
    best_x, best_f = x.copy(), math.inf
    for k in range(schedule.max_iterations):
        ak = schedule.a / (k + 1 + A) ** schedule.alpha
        ck = schedule.c / (k + 1) ** schedule.gamma
        delta = rng.choice((-1.0, 1.0), size=x.size)
        y_plus = f(x + ck * delta, k)
        y_minus = f(x - ck * delta, k)
        n_grad += 2
        x = x - ak * (y_plus - y_minus) / (2 * ck) * delta
        if schedule.track_best:
            fx = f(x, k)
            n_track += 1
            trace.append(fx)
            if fx < best_f:
                best_x, best_f = x.copy(), fx
        else:
            trace.append(0.5 * (y_plus + y_minus))
    if not schedule.track_best:
        best_x, best_f = x, f(x, schedule.max_iterations)
        n_track += 1
    return SpsaResult(best_x, best_f, trace, n_grad, n_track, schedule.max_iterations)


@dataclass
class VqeResult:
    best_energy: float
    best_parameters: np.ndarray
    energy_trace: list[float]
    layers: int
    objective_value: float = math.nan
    overlap: float | None = None
    nfev: int = 0
    extra: dict = field(default_factory=dict)


def _energy_fn(h: PauliSum, mode: str, shots: int, seed: int):
    if mode == "exact":
        return lambda state: expectation_on_state(h, state)
    if mode != "shots":
        raise ValueError(f"mode must be 'exact' or 'shots', got {mode!r}")
    if shots < 1:
        raise ValueError("shot mode needs shots >= 1")
    rng = make_rng(seed, 0x5EED)
    return lambda state: estimate_pauli_sum(h, state, shots, rng)


def initial_parameters(ansatz: Ansatz, seed: int) -> np.ndarray:
    return make_rng(seed, 0x1A17).uniform(-np.pi, np.pi, ansatz.n_params)


def _minimize(h, ansatz, schedule, mode, shots, penalty=None, x0=None, restarts=1) -> VqeResult:
    """Best of ``restarts`` independent SPSA runs, ranked by the final objective."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for r in range(restarts):
        sched = schedule if r == 0 else replace(schedule, seed=derive_seed(schedule.seed, r))
        start = x0 if (x0 is not None and r == 0) else None
        res = _single_run(h, ansatz, sched, mode, shots, penalty, start)
        if best is None or res.objective_value < best.objective_value:
            best = res
        best.extra.setdefault("restart_objectives", []).append(res.objective_value)
    return best


def _single_run(h, ansatz, schedule, mode, shots, penalty, x0) -> VqeResult:
    energy = _energy_fn(h, mode, shots, schedule.seed)

    def objective(p):
        state = ansatz_state(ansatz, p)
        val = energy(state)
        if penalty is not None:
            val += penalty(state)
        return val

    if x0 is None:
        x0 = initial_parameters(ansatz, schedule.seed)
    res = spsa_minimize(objective, x0, schedule)
    final_state = ansatz_state(ansatz, res.x)
    # fresh estimate: the tracked minimum of noisy values is biased low
    final_energy = energy(final_state)
    final_objective = final_energy + (penalty(final_state) if penalty is not None else 0.0)
    return VqeResult(
        best_energy=float(final_energy),
        best_parameters=res.x,
        energy_trace=res.trace,
        layers=ansatz.n_layers,
        objective_value=float(final_objective),
        nfev=res.nfev_gradient + res.nfev_tracking,
    )


def ground_state(
    h: PauliSum,
    layers: int,
    schedule: SpsaSchedule = SpsaSchedule(),
    mode: str = "exact",
    shots: int = 0,
    entangler: bool = True,
    x0=None,
    restarts: int = 1,
) -> VqeResult:
    ansatz = Ansatz(h.n_qubits, layers, entangler)
    return _minimize(h, ansatz, schedule, mode, shots, x0=x0, restarts=restarts)


def first_excited_state(
    h: PauliSum,
    ground: VqeResult,
    layers: int | None = None,
    schedule: SpsaSchedule = SpsaSchedule(),
    beta: float = 3.0,
    mode: str = "exact",
    shots: int = 0,
    entangler: bool = True,
    x0=None,
    restarts: int = 1,
) -> VqeResult:
    """Deflated VQE; ``beta`` should exceed the gap between E0 and E1."""
    if beta < 0:
        raise ValueError("penalty weight beta must be non-negative")
    n = h.n_qubits
    ground_ansatz = Ansatz(n, ground.layers, entangler)
    ground_amps = ansatz_state(ground_ansatz, ground.best_parameters).amplitudes
    ansatz = Ansatz(n, layers or ground.layers, entangler)

    def overlap(state):
        return abs(np.vdot(ground_amps, state.amplitudes)) ** 2

    penalty = None if beta == 0 else (lambda state: beta * overlap(state))
    res = _minimize(h, ansatz, schedule, mode, shots, penalty=penalty, x0=x0, restarts=restarts)
    res.overlap = float(overlap(ansatz_state(ansatz, res.best_parameters)))
    return res


@dataclass(frozen=True)
class LayerRow:
    layers: int
    ground_energy: float
    excited_energy: float | None
    seed: int


def layer_sweep(
    h: PauliSum,
    layers: Sequence[int],
    schedule: SpsaSchedule = SpsaSchedule(),
    mode: str = "exact",
    shots: int = 0,
    entangler: bool = True,
    excited: bool = True,
    beta: float = 3.0,
    restarts: int = 1,
) -> list[LayerRow]:
    """One ground (and optionally deflated excited) run per layer count.

    Each layer count gets its own seed derived from ``schedule.seed`` and ``L``,
    so rows do not depend on which other layer counts are requested.
    """
    return [
        layer_point(h, L, schedule, mode, shots, entangler, excited, beta, restarts)
        for L in layers
    ]


def layer_point(
    h, L, schedule, mode="exact", shots=0, entangler=True, excited=True, beta=3.0, restarts=1
) -> LayerRow:
    seed = derive_seed(schedule.seed, L)
    sched = replace(schedule, seed=seed)
    g = ground_state(h, L, sched, mode, shots, entangler, restarts=restarts)
    e = None
    if excited:
        e = first_excited_state(
            h, g, L, replace(sched, seed=derive_seed(seed, 1)), beta, mode, shots, entangler,
            restarts=restarts,
        ).best_energy
    logger.debug("layers=%d E0=%.6f E1=%s", L, g.best_energy, e)
    return LayerRow(L, g.best_energy, e, seed)
