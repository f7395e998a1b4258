import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerchain.pauli import (
    CapacityError,
    PauliString,
    PauliSum,
    build_hamiltonian,
    expectation_on_state,
    to_dense_matrix,
)
from dimerchain.statevector import StateVector, init_basis

from conftest import random_state

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2)


def chain_oracle(omegas, lam):
    """Dense Hamiltonian assembled with explicit Kronecker products (qubit 0 rightmost)."""
    n = len(omegas)

    def op_on(mats):
        out = np.eye(1)
        for q in reversed(range(n)):
            out = np.kron(out, mats.get(q, I2))
        return out

    h = sum(w / 2 * op_on({j: Z}) for j, w in enumerate(omegas))
    for j in range(n - 1):
        h = h + lam * (op_on({j: X, j + 1: X}) + op_on({j: Y, j + 1: Y}))
    return h


class TestPauliString:
    def test_label_round_trip_puts_qubit_zero_rightmost(self):
        s = PauliString.from_label("XYZ")
        assert s.ops == ("Z", "Y", "X")
        assert s.label == "XYZ"
        assert s.support == (0, 1, 2)

    def test_single_qubit_matrix_z_is_standard(self):
        np.testing.assert_array_equal(PauliString(("Z",)).to_matrix(), Z)

    def test_matrix_ordering(self):
        # X on qubit 0, Z on qubit 1: kron(Z, X)
        np.testing.assert_allclose(PauliString(("X", "Z")).to_matrix(), np.kron(Z, X))

    def test_rejects_bad_symbols(self):
        with pytest.raises(ValueError):
            PauliString(("A",))
        with pytest.raises(ValueError):
            PauliString(())

    @given(st.text(alphabet="IXYZ", min_size=1, max_size=5), st.integers(0, 2**31 - 1))
    @settings(max_examples=60, deadline=None)
    def test_apply_matches_matrix(self, label, seed):
        s = PauliString.from_label(label)
        psi = random_state(s.n_qubits, np.random.default_rng(seed)).amplitudes
        np.testing.assert_allclose(s.apply(psi), s.to_matrix() @ psi, atol=1e-12)


class TestBuildHamiltonian:
    def test_single_qubit_has_no_coupling(self):
        h = build_hamiltonian(1, [2.0], 0.7)
        assert h.to_list() == [(1.0, "Z")]

    def test_two_qubit_terms(self):
        h = build_hamiltonian(2, [1, 1], 0.5)
        assert sorted(h.to_list()) == sorted(
            [(0.5, "IZ"), (0.5, "ZI"), (0.5, "XX"), (0.5, "YY")]
        )

    def test_three_qubit_term_count(self):
        h = build_hamiltonian(3, [1, 1, 1], 0.2)
        labels = [lab for _, lab in h.to_list()]
        assert sum(set(lab) <= {"I", "Z"} for lab in labels) == 3
        assert len(labels) == 7

    def test_omega_length_mismatch(self):
        with pytest.raises(ValueError):
            build_hamiltonian(2, [1.0], 0.5)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            build_hamiltonian(2, [1.0, np.nan], 0.5)

    def test_mixed_width_sum_rejected(self):
        with pytest.raises(ValueError):
            PauliSum.from_list([(1.0, "Z"), (1.0, "ZZ")])


class TestDenseMatrix:
    def test_single_z(self):
        np.testing.assert_array_equal(to_dense_matrix(PauliSum.from_list([(1.0, "Z")])), Z)

    def test_degenerate_spectrum(self):
        vals = np.linalg.eigvalsh(to_dense_matrix(build_hamiltonian(2, [1, 1], 0.5)))
        np.testing.assert_allclose(vals, [-1, -1, 1, 1], atol=1e-12)

    def test_detuned_spectrum(self):
        vals = np.linalg.eigvalsh(to_dense_matrix(build_hamiltonian(2, [1.0, 0.5], 0.3)))
        np.testing.assert_allclose(vals, [-0.75, -0.65, 0.65, 0.75], atol=1e-12)

    @given(
        st.lists(st.floats(-3, 3), min_size=1, max_size=5),
        st.floats(-2, 2),
    )
    @settings(max_examples=40, deadline=None)
    def test_matches_kron_oracle_and_is_hermitian(self, omegas, lam):
        m = to_dense_matrix(build_hamiltonian(len(omegas), omegas, lam))
        np.testing.assert_allclose(m, chain_oracle(omegas, lam), atol=1e-12)
        np.testing.assert_allclose(m, m.conj().T, atol=1e-14)

    def test_capacity_guard(self):
        h = PauliSum.from_list([(1.0, "Z" * 13)])
        with pytest.raises(CapacityError):
            to_dense_matrix(h)


class TestExpectation:
    def test_z_on_zero(self):
        h = PauliSum.from_list([(1.0, "Z")])
        assert expectation_on_state(h, init_basis(1, "0")) == pytest.approx(1.0)

    def test_z_on_plus(self):
        h = PauliSum.from_list([(1.0, "Z")])
        plus = StateVector(np.array([1, 1]) / np.sqrt(2))
        assert expectation_on_state(h, plus) == pytest.approx(0.0, abs=1e-15)

    def test_singlet_energy(self):
        h = build_hamiltonian(2, [1, 1], 0.5)
        singlet = np.zeros(4, dtype=complex)
        singlet[0b01], singlet[0b10] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        assert expectation_on_state(h, StateVector(singlet)) == pytest.approx(-1.0, abs=1e-12)

    def test_dimension_mismatch(self):
        h = build_hamiltonian(2, [1, 1], 0.5)
        with pytest.raises(ValueError):
            expectation_on_state(h, init_basis(3, "000"))

    @given(
        st.integers(1, 5),
        st.integers(0, 2**31 - 1),
        st.floats(-2, 2),
    )
    @settings(max_examples=50, deadline=None)
    def test_agrees_with_dense_and_respects_variational_bound(self, n, seed, lam):
        rng = np.random.default_rng(seed)
        omegas = rng.uniform(-2, 2, n)
        h = build_hamiltonian(n, omegas, lam)
        psi = random_state(n, rng)
        m = to_dense_matrix(h)
        dense = np.vdot(psi.amplitudes, m @ psi.amplitudes).real
        e = expectation_on_state(h, psi)
        assert abs(e - dense) < 1e-10
        assert np.linalg.eigvalsh(m)[0] <= e + 1e-12
