"""Pauli strings with exact quarter-phase bookkeeping.

A string on ``N`` qubits is stored as two bit masks: bit ``q`` of ``x`` is set
when qubit ``q`` carries X or Y, bit ``q`` of ``z`` when it carries Z or Y.
Qubit 0 is the leftmost letter of the text form and the most significant
tensor factor of the dense matrix.

A letter with bits ``(x, z)`` is the matrix ``i^(x*z) X^x Z^z``, so Y = iXZ.
Products of two letters then pick up the phase exponent

    x1*z1 + x2*z2 + 2*z1*x2 - x3*z3   (mod 4),

summed over qubits, where ``(x3, z3)`` is the XOR of the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

_LETTERS = "IXZY"  # indexed by x + 2*z
_CODES = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)

WORD_BITS = 64


@dataclass(frozen=True, slots=True)
class PauliString:
    """Tensor product of single-qubit Paulis, without a phase."""

    num_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        limit = 1 << self.num_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("mask has bits beyond num_qubits")

    @classmethod
    def identity(cls, num_qubits: int) -> PauliString:
        return cls(num_qubits, 0, 0)

    @classmethod
    def from_label(cls, text: str) -> PauliString:
        return parse(text)

    def __str__(self) -> str:
        return format_pauli(self)

    def __repr__(self) -> str:
        return f"PauliString({format_pauli(self)!r})"

    def letter(self, qubit: int) -> str:
        xb = (self.x >> qubit) & 1
        zb = (self.z >> qubit) & 1
        return _LETTERS[xb + 2 * zb]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x | self.z
        return tuple(q for q in range(self.num_qubits) if (mask >> q) & 1)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def words(self) -> tuple[np.ndarray, np.ndarray]:
        """Masks packed into little-endian arrays of 64-bit words."""
        nwords = num_words(self.num_qubits)
        return pack_words(self.x, nwords), pack_words(self.z, nwords)

    def to_matrix(self) -> np.ndarray:
        return reduce(np.kron, (_MATRICES[self.letter(q)] for q in range(self.num_qubits)))


@dataclass(frozen=True, slots=True)
class PhasedPauli:
    """``i**phase`` times a Pauli string; ``phase`` is kept in {0, 1, 2, 3}."""

    phase: int
    pauli: PauliString

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def coefficient(self) -> complex:
        return _I_POWERS[self.phase]

    def __mul__(self, other: PhasedPauli) -> PhasedPauli:
        prod = mul(self.pauli, other.pauli)
        return PhasedPauli(self.phase + other.phase + prod.phase, prod.pauli)

    def __str__(self) -> str:
        return ("+", "+i", "-", "-i")[self.phase] + format_pauli(self.pauli)

    def to_matrix(self) -> np.ndarray:
        return self.coefficient * self.pauli.to_matrix()


def num_words(num_qubits: int) -> int:
    return -(-num_qubits // WORD_BITS)


def pack_words(mask: int, nwords: int) -> np.ndarray:
    out = np.empty(nwords, dtype=np.uint64)
    for w in range(nwords):
        out[w] = (mask >> (WORD_BITS * w)) & 0xFFFF_FFFF_FFFF_FFFF
    return out


def parse(text: str) -> PauliString:
    """Parse ``"XIZ"`` style text; qubit 0 is the leftmost letter."""
    if not isinstance(text, str) or not text:
        raise ValueError("Pauli label must be a non-empty string")
    x = z = 0
    for q, ch in enumerate(text):
        try:
            xb, zb = _CODES[ch]
        except KeyError:
            raise ValueError(f"illegal Pauli letter {ch!r} in {text!r}") from None
        x |= xb << q
        z |= zb << q
    return PauliString(len(text), x, z)


def format_pauli(p: PauliString) -> str:
    return "".join(p.letter(q) for q in range(p.num_qubits))


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}")


def mul(a: PauliString, b: PauliString) -> PhasedPauli:
    """Matrix product ``a @ b`` as a phased Pauli."""
    _check_sizes(a, b)
    x3 = a.x ^ b.x
    z3 = a.z ^ b.z
    k = (
        (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        + 2 * (a.z & b.x).bit_count()
        - (x3 & z3).bit_count()
    )
    return PhasedPauli(k, PauliString(a.num_qubits, x3, z3))


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


def normalized_trace(p: PhasedPauli) -> complex:
    """``tr(p) / 2**N``: the phase for the identity string, zero otherwise."""
    return p.coefficient if p.pauli.is_identity else 0j


def all_paulis(num_qubits: int, include_identity: bool = True) -> list[PauliString]:
    """Every string on ``num_qubits`` qubits in a fixed order."""
    out = []
    for x in range(1 << num_qubits):
        for z in range(1 << num_qubits):
            if x == 0 and z == 0 and not include_identity:
                continue
            out.append(PauliString(num_qubits, x, z))
    return out
