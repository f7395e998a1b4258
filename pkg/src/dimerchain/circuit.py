"""Circuit representation: an ordered list of gate applications.

A two-qubit :class:`GateOp` lists its qubits in tensor-factor order, i.e.
``qubits[0]`` is the first factor of the 4x4 gate matrix. For ``cx`` that
is ``(control, target)``; for ``cu3``/``acu3`` it is ``(target, control)``.
The builder methods on :class:`Circuit` take keyword roles so callers never
have to remember this.

Text dump format, one op per line::

    <name> <param>,<param>,... <qubit>,<qubit>

with ``-`` standing in for an empty parameter list, parameters written with
``repr`` so the dump round-trips exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gates import GATES, gate_matrix
from .pauli import CapacityError

MAX_UNITARY_QUBITS = 10


@dataclass(frozen=True)
class GateOp:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.name not in GATES:
            raise ValueError(f"unknown gate {self.name!r}")
        n_qubits, n_params, _ = GATES[self.name]
        if len(self.qubits) != n_qubits:
            raise ValueError(f"{self.name} acts on {n_qubits} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name} needs distinct qubits, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if len(self.params) != n_params:
            raise ValueError(f"{self.name} takes {n_params} parameter(s), got {self.params}")

    @property
    def matrix(self) -> np.ndarray:
        return gate_matrix(self.name, self.params)

    def to_text(self) -> str:
        params = ",".join(repr(p) for p in self.params) or "-"
        return f"{self.name} {params} {','.join(map(str, self.qubits))}"

    @classmethod
    def from_text(cls, line: str) -> GateOp:
        name, params, qubits = line.split()
        ps = () if params == "-" else tuple(float(p) for p in params.split(","))
        return cls(name, tuple(int(q) for q in qubits.split(",")), ps)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[GateOp, ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            self._check(op)

    def _check(self, op: GateOp) -> None:
        if max(op.qubits) >= self.n_qubits:
            raise ValueError(
                f"{op.name} on qubits {op.qubits} is out of range for {self.n_qubits} qubits"
            )

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def append(self, op: GateOp) -> Circuit:
        self._check(op)
        return Circuit(self.n_qubits, self.ops + (op,))

    def extend(self, ops) -> Circuit:
        c = self
        for op in ops:
            c = c.append(op)
        return c

    def __add__(self, other: Circuit) -> Circuit:
        return concat(self, other)

    # builders -------------------------------------------------------------

    def h(self, q: int) -> Circuit:
        return self.append(GateOp("h", (q,)))

    def x(self, q: int) -> Circuit:
        return self.append(GateOp("x", (q,)))

    def sdg(self, q: int) -> Circuit:
        return self.append(GateOp("sdg", (q,)))

    def u1(self, theta: float, q: int) -> Circuit:
        return self.append(GateOp("u1", (q,), (theta,)))

    def u3(self, theta: float, phi: float, lam: float, q: int) -> Circuit:
        return self.append(GateOp("u3", (q,), (theta, phi, lam)))

    def u3dg(self, theta: float, phi: float, lam: float, q: int) -> Circuit:
        return self.append(GateOp("u3dg", (q,), (theta, phi, lam)))

    def cx(self, control: int, target: int) -> Circuit:
        return self.append(GateOp("cx", (control, target)))

    def cu3(self, theta, phi, lam, *, control: int, target: int, anti: bool = False) -> Circuit:
        name = "acu3" if anti else "cu3"
        return self.append(GateOp(name, (target, control), (theta, phi, lam)))

    # views ----------------------------------------------------------------

    def count_ops(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for op in self.ops:
            counts[op.name] = counts.get(op.name, 0) + 1
        return counts

    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}"] + [op.to_text() for op in self.ops]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head, *body = lines
        key, n = head.split()
        if key != "qubits":
            raise ValueError(f"circuit dump must start with 'qubits <n>', got {head!r}")
        return cls(int(n), tuple(GateOp.from_text(ln) for ln in body))

    def to_unitary(self) -> np.ndarray:
        return to_unitary(self)


def concat(a: Circuit, b: Circuit) -> Circuit:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"cannot concatenate {a.n_qubits}- and {b.n_qubits}-qubit circuits")
    return Circuit(a.n_qubits, a.ops + b.ops)


def embed(op: GateOp, n_qubits: int) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of ``op`` on the full register (oracle path)."""
    m = op.matrix
    dim = 1 << n_qubits
    idx = np.arange(dim)
    k = len(op.qubits)
    # local index: first listed qubit is the most significant bit
    local = np.zeros(dim, dtype=np.int64)
    rest = idx.copy()
    for pos, q in enumerate(op.qubits):
        bit = (idx >> q) & 1
        local |= bit << (k - 1 - pos)
        rest &= ~(1 << q)
    same_rest = rest[:, None] == rest[None, :]
    return np.where(same_rest, m[local[:, None], local[None, :]], 0)


def to_unitary(c: Circuit) -> np.ndarray:
    """Product of embedded gate matrices; later ops multiply on the left."""
    if c.n_qubits > MAX_UNITARY_QUBITS:
        raise CapacityError(
            f"unitary of a {c.n_qubits}-qubit circuit exceeds the {MAX_UNITARY_QUBITS}-qubit guard"
        )
    u = np.eye(1 << c.n_qubits, dtype=complex)
    for op in c.ops:
        u = embed(op, c.n_qubits) @ u
    return u
