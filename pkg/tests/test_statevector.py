import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from dimerchain.circuit import Circuit
from dimerchain.statevector import (
    ShotResult,
    StateVector,
    init_basis,
    probabilities,
    sample,
    sample_probabilities,
    simulate,
)
from dimerchain.trotter import TrotterPlan, build_full_circuit

from conftest import random_circuit, random_state

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


class TestInitBasis:
    def test_two_qubit_zero(self):
        np.testing.assert_array_equal(init_basis(2, "00").probabilities(), [1, 0, 0, 0])

    def test_single_one(self):
        np.testing.assert_array_equal(init_basis(1, "1").probabilities(), [0, 1])

    def test_endianness(self):
        amps = init_basis(3, "010").amplitudes
        assert amps[2] == 1 and np.count_nonzero(amps) == 1

    @pytest.mark.parametrize("label", ["0", "012", "0a"])
    def test_bad_label(self, label):
        with pytest.raises(ValueError):
            init_basis(2, label)


class TestApply:
    def test_hadamard(self):
        np.testing.assert_allclose(simulate(Circuit(1).h(0)).amplitudes, [1 / np.sqrt(2)] * 2)

    def test_bell_from_cnot_with_control_on_qubit_zero(self):
        # (|00> + |01>)/sqrt2 in register labels (qubit 0 rightmost) -> Bell
        psi = simulate(Circuit(2).h(0).cx(0, 1))
        np.testing.assert_allclose(psi.amplitudes, BELL, atol=1e-15)

    def test_full_trotter_circuit_matches_dense(self):
        plan = TrotterPlan(2, (1.0, 0.5), lam=math.pi / 4, t=1.0, initial_layer=True)
        c = build_full_circuit(plan)
        expected = c.to_unitary()[:, 0]
        np.testing.assert_allclose(simulate(c).amplitudes, expected, atol=1e-12)

    def test_out_of_range(self):
        c = Circuit(3).h(2)
        with pytest.raises(ValueError):
            StateVector.zeros(2).run(c)
        with pytest.raises(ValueError):
            StateVector.zeros(2).apply(c.ops[0])

    def test_simulate_does_not_mutate_initial(self):
        s = init_basis(2, "00")
        simulate(Circuit(2).h(0), s)
        np.testing.assert_array_equal(s.amplitudes, [1, 0, 0, 0])

    @given(st.integers(1, 5), st.integers(0, 2**31 - 1))
    @settings(max_examples=60, deadline=None)
    def test_kernel_matches_oracle_and_keeps_norm(self, n, seed):
        rng = np.random.default_rng(seed)
        c = random_circuit(n, int(rng.integers(1, 25)), rng)
        psi0 = random_state(n, rng)
        out = simulate(c, psi0)
        assert np.linalg.norm(out.amplitudes - c.to_unitary() @ psi0.amplitudes) < 1e-9
        assert abs(out.norm() - 1) < 1e-10


class TestProbabilities:
    def test_bell(self):
        np.testing.assert_allclose(probabilities(StateVector(BELL)), [0.5, 0, 0, 0.5])

    def test_zero(self):
        np.testing.assert_array_equal(init_basis(1, "0").probabilities(), [1, 0])

    def test_xx_rotation_quarter_pi(self):
        xx = np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]])
        psi = StateVector(expm(-1j * np.pi / 4 * xx) @ np.eye(4)[0])
        np.testing.assert_allclose(psi.probabilities(), [0.5, 0, 0, 0.5], atol=1e-15)


class TestSampling:
    def test_basis_state(self):
        r = sample(init_basis(2, "10"), 1000, seed=3)
        assert r.counts == {"10": 1000}

    def test_bell_statistics_and_reproducibility(self):
        bell = StateVector(BELL)
        r1, r2 = sample(bell, 8192, 11), sample(bell, 8192, 11)
        assert r1 == r2
        assert set(r1.counts) <= {"00", "11"}
        sigma = math.sqrt(8192 * 0.25)
        assert abs(r1.counts["00"] - 4096) < 4 * sigma

    def test_small_shot_count(self):
        r = sample(StateVector(np.full(4, 0.5)), 4, 0)
        assert sum(r.counts.values()) == 4 == r.shots

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError):
            sample(init_basis(1, "0"), 0, 0)

    def test_counts_must_sum(self):
        with pytest.raises(ValueError):
            ShotResult({"0": 3}, 4)

    def test_frequencies_converge(self, rng):
        psi = random_state(3, rng)
        p = psi.probabilities()
        shots = 100_000
        f = sample(psi, shots, 5).frequencies()
        sigma = np.sqrt(p * (1 - p) / shots)
        assert np.all(np.abs(f - p) <= 5 * sigma + 1e-12)

    def test_generator_argument(self):
        g = np.random.default_rng(0)
        r = sample_probabilities(np.array([0.25] * 4), 100, g)
        assert r.n_qubits == 2
