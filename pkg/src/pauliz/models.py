"""Hamiltonian generators: random test instances, the transverse-field Ising
chain and the Fermi-Hubbard model under Jordan-Wigner."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .hamiltonian import PauliHamiltonian
from .pauli import PauliString

BETA_RANGE = (0.1, 2.0)
HUBBARD_MAX_QUBITS = 24


def _pauli_from_index(n: int, index: int) -> PauliString:
    """Base-4 digits of ``index`` as letters I, X, Y, Z with qubit 0 most significant."""
    label = []
    for _ in range(n):
        label.append("IXYZ"[index % 4])
        index //= 4
    return PauliString.from_label("".join(reversed(label)))


def random_hamiltonian(
    rng: np.random.Generator, max_qubits: int = 3, max_terms: int = 4
) -> PauliHamiltonian:
    """Random instance of the correctness experiment.

    ``N ~ U{1..max_qubits}``, ``L ~ U{1..max_terms}`` (capped at the
    ``4^N - 1`` available strings), distinct non-identity Pauli strings
    drawn uniformly, coefficients ``~ U[-1, 1]``.
    """
    n = int(rng.integers(1, max_qubits + 1))
    L = min(int(rng.integers(1, max_terms + 1)), 4**n - 1)
    idx = rng.choice(np.arange(1, 4**n), size=L, replace=False)
    hs = rng.uniform(-1.0, 1.0, size=L)
    return PauliHamiltonian(n, tuple((float(h), _pauli_from_index(n, int(i))) for h, i in zip(hs, idx)))


def random_beta(rng: np.random.Generator) -> float:
    """Inverse temperature policy of the correctness experiment: ``U[0.1, 2]``."""
    return float(rng.uniform(*BETA_RANGE))


def tfim(n: int, J: float = 1.0, g: float = 1.0) -> PauliHamiltonian:
    """Open transverse-field Ising chain ``-J sum Z_i Z_{i+1} - g sum X_i``."""
    if n < 2:
        raise ValueError("the Ising chain needs at least two sites")
    terms = []
    for i in range(n - 1):
        terms.append((-J, "I" * i + "ZZ" + "I" * (n - i - 2)))
    for i in range(n):
        terms.append((-g, "I" * i + "X" + "I" * (n - i - 1)))
    return PauliHamiltonian.from_labels(terms)


@dataclass(frozen=True)
class HubbardSpec:
    """Open-boundary ``Lx x Ly`` Fermi-Hubbard lattice.

    Sites are numbered row-major (``site = y * Lx + x``) and each site holds
    spin-up then spin-down, so mode ``2 * site + spin`` is qubit of that index.
    """

    Lx: int
    Ly: int
    t: float = 1.0
    U: float = 4.0

    def __post_init__(self):
        if self.Lx < 1 or self.Ly < 1:
            raise ValueError("lattice dimensions must be at least 1")
        if not (math.isfinite(self.t) and math.isfinite(self.U)):
            raise ValueError("t and U must be finite")

    @property
    def num_sites(self) -> int:
        return self.Lx * self.Ly

    @property
    def num_qubits(self) -> int:
        return 2 * self.num_sites

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour site pairs ``(i, j)`` with ``i < j``."""
        out = []
        for y in range(self.Ly):
            for x in range(self.Lx):
                i = y * self.Lx + x
                if x + 1 < self.Lx:
                    out.append((i, i + 1))
                if y + 1 < self.Ly:
                    out.append((i, i + self.Lx))
        return out


def _string(n: int, letters: dict[int, str]) -> str:
    return "".join(letters.get(q, "I") for q in range(n))


def hubbard_jordan_wigner(spec: HubbardSpec) -> PauliHamiltonian:
    """``-t sum (c_i^dag c_j + h.c.) + U sum n_up n_down`` as a Pauli sum.

    Hopping between modes ``p < q`` becomes ``-t/2 (X Z..Z X + Y Z..Z Y)``
    and ``n_up n_down`` becomes ``(I - Z_a - Z_b + Z_a Z_b) / 4``. Equal
    strings are merged; the identity term is kept so the spectrum is exact.
    """
    n = spec.num_qubits
    if n > HUBBARD_MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the Hubbard capacity of {HUBBARD_MAX_QUBITS}")
    acc: dict[str, float] = {}

    def add(label: str, h: float) -> None:
        acc[label] = acc.get(label, 0.0) + h

    for i, j in spec.bonds():
        for spin in (0, 1):
            p, q = 2 * i + spin, 2 * j + spin
            chain = {k: "Z" for k in range(p + 1, q)}
            add(_string(n, chain | {p: "X", q: "X"}), -spec.t / 2)
            add(_string(n, chain | {p: "Y", q: "Y"}), -spec.t / 2)
    for site in range(spec.num_sites):
        a, b = 2 * site, 2 * site + 1
        add(_string(n, {}), spec.U / 4)
        add(_string(n, {a: "Z"}), -spec.U / 4)
        add(_string(n, {b: "Z"}), -spec.U / 4)
        add(_string(n, {a: "Z", b: "Z"}), spec.U / 4)
    terms = [(h, label) for label, h in acc.items() if h != 0.0]
    if not terms:
        terms = [(0.0, _string(n, {}))]
    return PauliHamiltonian.from_labels(terms, num_qubits=n)
