"""Partition functions of Pauli-decomposed Hamiltonians by Monte Carlo sampling,
with a simulated one-clean-qubit estimator for complex inverse temperatures."""

from .circuit import Circuit, Gate, read_circuit, write_circuit
from .dqc1 import build_imaginary_gadget, build_real_gadget, dqc1_partition_complex, dqc1_trace
from .errors import CapacityError, InfeasibleError, PaulizError, RoundCapError, SchemaError
from .hamiltonian import (
    InverseTemperature,
    PauliHamiltonian,
    TrotterPlan,
    diagnostics,
    parse_hamiltonian,
    plan_trotter_additive,
    plan_trotter_multiplicative,
    split_multiplicative_error,
    write_hamiltonian,
)
from .models import HubbardSpec, hubbard_jordan_wigner, random_hamiltonian, tfim
from .oracle import exact_partition, exact_trotter
from .pauli import PauliString, PhasedPauli, commutes, mul, parse
from .reduction import dagger, reduce, verify_reduction
from .sampler import (
    EstimateReport,
    estimate_additive,
    estimate_multiplicative,
    estimate_partition,
    lemma1_split,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "Circuit", "EstimateReport", "Gate", "HubbardSpec", "InfeasibleError",
    "InverseTemperature", "PauliHamiltonian", "PauliString", "PaulizError", "PhasedPauli",
    "RoundCapError", "SchemaError", "TrotterPlan", "build_imaginary_gadget", "build_real_gadget",
    "commutes", "dagger", "diagnostics", "dqc1_partition_complex", "dqc1_trace", "estimate_additive",
    "estimate_multiplicative", "estimate_partition", "exact_partition", "exact_trotter",
    "hubbard_jordan_wigner", "lemma1_split", "mul", "parse", "parse_hamiltonian",
    "plan_trotter_additive", "plan_trotter_multiplicative", "random_hamiltonian", "read_circuit",
    "reduce", "split_multiplicative_error", "tfim", "verify_reduction", "write_circuit",
    "write_hamiltonian",
]
