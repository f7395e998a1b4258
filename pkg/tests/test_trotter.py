import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from dimerchain.circuit import Circuit
from dimerchain.exact import evolve_exact
from dimerchain.pauli import PauliString, build_hamiltonian, to_dense_matrix
from dimerchain.statevector import simulate
from dimerchain.trotter import (
    CALIBRATION,
    TrotterPlan,
    build_evolution,
    build_full_circuit,
    build_h1_layer,
    build_step,
    build_xx_block,
    build_yy_block,
    global_phase,
)


def pauli_pair(n, q, p):
    ops = ["I"] * n
    ops[q] = ops[q + 1] = p
    return PauliString(tuple(ops)).to_matrix()


def eq14(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0, 0, -1j * s], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [-1j * s, 0, 0, c]])


def eq17(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0, 0, 1j * s], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [1j * s, 0, 0, c]])


def equal_up_to_phase(a, b, atol=1e-10):
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    phase = a[k] / b[k]
    return abs(abs(phase) - 1) < atol and np.allclose(a, phase * b, atol=atol)


class TestPlan:
    def test_dt(self):
        p = TrotterPlan(2, (1, 1), 0.5, 2.0, n_steps=4)
        assert p.dt == 0.5 and p.dt * p.n_steps == p.t

    @pytest.mark.parametrize("kw", [{"n_steps": 0}, {"n_steps": 1.5}, {"omegas": (1,)}, {"lam": np.inf}])
    def test_validation(self, kw):
        args = dict(n_qubits=2, omegas=(1, 1), lam=0.5, t=1.0)
        args.update(kw)
        with pytest.raises(ValueError):
            TrotterPlan(**args)


class TestH1Layer:
    def test_zero_omega_is_identity(self):
        c = build_h1_layer(TrotterPlan(3, (0, 0, 0), 0.1, 1.0))
        np.testing.assert_allclose(c.to_unitary(), np.eye(8))

    def test_pi_is_z_up_to_phase(self):
        u = build_h1_layer(TrotterPlan(1, (np.pi,), 0.0, 1.0)).to_unitary()
        assert equal_up_to_phase(u, np.diag([1, -1]))
        np.testing.assert_allclose(u * np.exp(-1j * np.pi / 2), -1j * np.diag([1, -1]), atol=1e-15)

    def test_realizes_on_site_exponential(self, rng):
        omegas = tuple(rng.uniform(-2, 2, 3))
        plan = TrotterPlan(3, omegas, 0.0, 0.8)
        h1 = build_hamiltonian(3, omegas, 0.0)
        target = expm(-1j * plan.dt * to_dense_matrix(h1))
        u = build_h1_layer(plan).to_unitary() * np.exp(-1j * global_phase(plan))
        np.testing.assert_allclose(u, target, atol=1e-12)

    def test_layers_commute(self):
        a = build_h1_layer(TrotterPlan(2, (0.3, 1.2), 0.0, 0.4)).to_unitary()
        b = build_h1_layer(TrotterPlan(2, (0.3, 1.2), 0.0, 1.9)).to_unitary()
        np.testing.assert_allclose(a @ b, b @ a, atol=1e-15)


class TestBlocks:
    def test_calibration_table_is_frozen(self):
        assert CALIBRATION["u1_scale"] == 1.0
        assert CALIBRATION["xx_u3"] == (2.0, -np.pi / 2, np.pi / 2)
        assert CALIBRATION["yy_cu3"] == (2.0, -np.pi / 2, np.pi / 2)
        assert CALIBRATION["yy_acu3"] == (2.0, np.pi / 2, -np.pi / 2)

    @pytest.mark.parametrize("k", range(25))
    def test_blocks_match_printed_matrices(self, k):
        theta = k * np.pi / 12
        xx, yy = build_xx_block(2, 0, theta).to_unitary(), build_yy_block(2, 0, theta).to_unitary()
        np.testing.assert_allclose(xx, expm(-1j * theta * pauli_pair(2, 0, "X")), atol=1e-10)
        np.testing.assert_allclose(yy, expm(-1j * theta * pauli_pair(2, 0, "Y")), atol=1e-10)
        np.testing.assert_allclose(xx, eq14(theta), atol=1e-10)
        np.testing.assert_allclose(yy, eq17(theta), atol=1e-10)

    def test_seven_tenths_regression(self):
        u = build_xx_block(2, 0, 0.7).to_unitary()
        np.testing.assert_allclose(u, expm(-1j * 0.7 * pauli_pair(2, 0, "X")), atol=1e-12)
        assert not np.allclose(u, expm(-1j * 0.35 * pauli_pair(2, 0, "X")))

    @given(st.integers(2, 5), st.data(), st.floats(0, 2 * np.pi))
    @settings(max_examples=40, deadline=None)
    def test_any_bond(self, n, data, theta):
        q = data.draw(st.integers(0, n - 2))
        for build, p in ((build_xx_block, "X"), (build_yy_block, "Y")):
            u = build(n, q, theta).to_unitary()
            np.testing.assert_allclose(u, expm(-1j * theta * pauli_pair(n, q, p)), atol=1e-10)

    def test_zero_angle_is_identity(self):
        np.testing.assert_allclose(build_xx_block(2, 0, 0).to_unitary(), np.eye(4), atol=1e-15)
        np.testing.assert_allclose(build_yy_block(2, 0, 0).to_unitary(), np.eye(4), atol=1e-15)

    def test_quarter_pi_amplitudes(self):
        a = simulate(build_xx_block(2, 0, np.pi / 4)).amplitudes
        b = simulate(build_yy_block(2, 0, np.pi / 4)).amplitudes
        np.testing.assert_allclose(np.abs(a) ** 2, [0.5, 0, 0, 0.5], atol=1e-15)
        np.testing.assert_allclose(np.abs(b) ** 2, [0.5, 0, 0, 0.5], atol=1e-15)
        s = np.sqrt(0.5)
        np.testing.assert_allclose(a[3], -1j * s, atol=1e-15)
        np.testing.assert_allclose(b[3], +1j * s, atol=1e-15)

    def test_xx_and_yy_commute(self):
        a, b = build_xx_block(2, 0, 0.41).to_unitary(), build_yy_block(2, 0, 1.3).to_unitary()
        assert np.abs(a @ b - b @ a).max() < 1e-10

    def test_invalid_bond(self):
        with pytest.raises(ValueError):
            build_xx_block(2, 1, 0.1)
        with pytest.raises(ValueError):
            build_yy_block(3, -1, 0.1)


class TestFullCircuit:
    def test_uncoupled_matches_exact(self):
        plan = TrotterPlan(3, (1.0, 0.3, -0.7), 0.0, 1.3, n_steps=3, initial_layer=False)
        u = build_evolution(plan).to_unitary() * np.exp(-1j * global_phase(plan))
        psi = simulate(build_full_circuit(plan)).amplitudes * np.exp(-1j * global_phase(plan))
        exact = evolve_exact(plan.hamiltonian(), plan.t, np.eye(8)[0]).amplitudes
        np.testing.assert_allclose(psi, exact, atol=1e-12)
        assert u.shape == (8, 8)

    def test_hundred_steps_state_infidelity(self):
        plan = TrotterPlan(2, (1.0, 0.5), 0.3, 1.0, n_steps=100, initial_layer=False)
        psi = simulate(build_full_circuit(plan)).amplitudes
        exact = evolve_exact(plan.hamiltonian(), 1.0, np.eye(4)[0]).amplitudes
        assert 1 - abs(np.vdot(exact, psi)) ** 2 < 1e-3

    def test_superposed_start_infidelity(self):
        plan = TrotterPlan(2, (1.0, 0.5), 0.3, 1.0, n_steps=100, initial_layer=True)
        psi = simulate(build_full_circuit(plan)).amplitudes
        start = np.array([1, 1, 0, 0]) / np.sqrt(2)
        exact = evolve_exact(plan.hamiltonian(), 1.0, start).amplitudes
        assert 1 - abs(np.vdot(exact, psi)) ** 2 < 1e-3

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_cancellation_keeps_unitary(self, n, rng):
        plan = TrotterPlan(n, tuple(rng.uniform(-1, 1, n)), 0.37, 0.9, n_steps=2)
        a, b = build_full_circuit(plan, cancel=True), build_full_circuit(plan, cancel=False)
        assert len(a) < len(b)
        assert b.count_ops()["cx"] - a.count_ops()["cx"] == 2 * (n - 1) * plan.n_steps
        np.testing.assert_allclose(a.to_unitary(), b.to_unitary(), atol=1e-10)

    def test_initial_layer_is_hadamard_on_qubit_zero(self):
        plan = TrotterPlan(2, (1, 1), 0.5, 1.0)
        assert build_full_circuit(plan).ops[0].name == "h"
        assert build_full_circuit(plan).ops[0].qubits == (0,)
        bare = TrotterPlan(2, (1, 1), 0.5, 1.0, initial_layer=False)
        assert build_full_circuit(bare).ops[0].name == "u1"

    def test_step_matches_bond_ordered_product(self, rng):
        n = 3
        omegas = tuple(rng.uniform(-1, 1, n))
        plan = TrotterPlan(n, omegas, 0.4, 0.6, initial_layer=False)
        u = expm(-1j * plan.dt * to_dense_matrix(build_hamiltonian(n, omegas, 0.0)))
        for q in range(n - 1):
            for p in "XY":
                u = expm(-1j * plan.lam * plan.dt * pauli_pair(n, q, p)) @ u
        step = build_step(plan).to_unitary() * np.exp(-1j * global_phase(plan))
        np.testing.assert_allclose(step, u, atol=1e-12)

    def test_disjoint_bonds_commute(self):
        n = 4
        blocks = {q: build_xx_block(n, q, 0.3) + build_yy_block(n, q, 0.3) for q in (0, 2)}
        a = (blocks[0] + blocks[2]).to_unitary()
        b = (blocks[2] + blocks[0]).to_unitary()
        np.testing.assert_allclose(a, b, atol=1e-10)

    def test_generic_order_matters_for_shared_qubit(self):
        # bonds (0,1) and (1,2) share qubit 1 so their order is a real choice
        n = 3
        a = (build_xx_block(n, 0, 0.5) + build_yy_block(n, 1, 0.5)).to_unitary()
        b = (build_yy_block(n, 1, 0.5) + build_xx_block(n, 0, 0.5)).to_unitary()
        assert not np.allclose(a, b)

    def test_empty_evolution_for_single_qubit(self):
        plan = TrotterPlan(1, (0.5,), 0.3, 1.0, n_steps=2, initial_layer=False)
        assert [op.name for op in build_full_circuit(plan)] == ["u1", "u1"]
        assert isinstance(build_evolution(plan), Circuit)
