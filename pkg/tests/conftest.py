from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import strategies as st

from pauliz.circuit import Circuit, Gate
from pauliz.hamiltonian import PauliHamiltonian
from pauliz.pauli import PauliString

LETTER_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def label_matrix(label: str) -> np.ndarray:
    """Kronecker product of letters, written independently of the package."""
    out = np.eye(1, dtype=complex)
    for ch in label:
        out = np.kron(out, LETTER_MATRICES[ch])
    return out


def hamiltonian_matrix(H: PauliHamiltonian) -> np.ndarray:
    dim = 2**H.num_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for h, p in H.terms:
        out += h * label_matrix(str(p))
    return out


def random_label(rng: np.random.Generator, n: int, allow_identity: bool = False) -> str:
    while True:
        label = "".join(rng.choice(list("IXYZ"), size=n))
        if allow_identity or set(label) != {"I"}:
            return label


def random_terms(rng: np.random.Generator, n: int, L: int) -> PauliHamiltonian:
    return PauliHamiltonian.from_labels(
        [(float(rng.uniform(-1, 1)), random_label(rng, n)) for _ in range(L)], num_qubits=n
    )


def random_circuit(rng: np.random.Generator, n: int, depth: int, kinds=None) -> Circuit:
    kinds = kinds or (["H", "S", "SDG", "X", "Y", "Z", "RX", "RZ"] + (["CX", "CRZ"] if n > 1 else []))
    gates = []
    for _ in range(depth):
        k = str(rng.choice(kinds))
        if k in ("CX", "CRZ"):
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(Gate(k, (int(a), int(b)), angle=float(rng.uniform(-math.pi, math.pi)) if k == "CRZ" else None))
        elif k in ("RX", "RZ"):
            gates.append(Gate(k, (int(rng.integers(n)),), angle=float(rng.uniform(-math.pi, math.pi))))
        else:
            gates.append(Gate(k, (int(rng.integers(n)),)))
    return Circuit(n, gates)


def labels(n: int):
    return st.text(alphabet="IXYZ", min_size=n, max_size=n)


def pauli_strategy(max_qubits: int = 3):
    return st.integers(1, max_qubits).flatmap(lambda n: labels(n).map(PauliString.from_label))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
