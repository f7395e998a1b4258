"""State-vector simulation of a Trotterized dimer spin chain, with VQE and tomography."""

from .circuit import Circuit, GateOp, concat, to_unitary
from .exact import Spectrum, evolve_exact, spectrum, trotter_error
from .observables import MeasurementSetting, basis_rotation_circuit, pauli_expectation_from_counts
from .pauli import PauliString, PauliSum, build_hamiltonian, expectation_on_state, to_dense_matrix
from .statevector import ShotResult, StateVector, init_basis, probabilities, sample, simulate
from .tomography import DensityMatrix, density_from_state, depolarize, fidelity, tomographic_reconstruction
from .trotter import TrotterPlan, build_full_circuit, build_xx_block, build_yy_block
from .vqe import Ansatz, SpsaSchedule, VqeResult, first_excited_state, ground_state, spsa_minimize

__version__ = "0.1.0"

__all__ = [
    "Ansatz",
    "Circuit",
    "DensityMatrix",
    "GateOp",
    "MeasurementSetting",
    "PauliString",
    "PauliSum",
    "ShotResult",
    "Spectrum",
    "SpsaSchedule",
    "StateVector",
    "TrotterPlan",
    "VqeResult",
    "basis_rotation_circuit",
    "build_full_circuit",
    "build_hamiltonian",
    "build_xx_block",
    "build_yy_block",
    "concat",
    "density_from_state",
    "depolarize",
    "evolve_exact",
    "expectation_on_state",
    "fidelity",
    "first_excited_state",
    "ground_state",
    "init_basis",
    "pauli_expectation_from_counts",
    "probabilities",
    "sample",
    "simulate",
    "spectrum",
    "spsa_minimize",
    "tomographic_reconstruction",
    "to_dense_matrix",
    "to_unitary",
    "trotter_error",
]
