"""From a unitary-trace problem to a Hermitian linear-combination problem.

A U-decomposition instance asks for ``Re`` or ``Im`` of ``tr(sigma U)``.
Because ``Re tr(sigma U) = Re tr(sigma (U + U^dag) / 2)`` and
``Im tr(sigma U) = Re tr(sigma * i (U^dag - U) / 2)`` for Hermitian
``sigma``, both questions become the real part of the trace against a
Hermitian combination of ``U`` and its adjoint circuit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .circuit import Circuit
from .errors import CapacityError, SchemaError
from .pauli import PauliString, parse
from .statevector import circuit_unitary

MAX_QUBITS = 10
PARTS = ("Re", "Im")


def dagger(c: Circuit) -> Circuit:
    """Reverse the gate list and replace each gate by its adjoint."""
    return Circuit(c.num_qubits, [g.adjoint() for g in reversed(c.gates)])


def _check_part(part: str) -> None:
    if part not in PARTS:
        raise ValueError(f"part must be one of {PARTS}")


def _check_sigma(circuit: Circuit, sigma: PauliString) -> None:
    if sigma.num_qubits != circuit.num_qubits:
        raise ValueError(f"sigma acts on {sigma.num_qubits} qubits, circuit on {circuit.num_qubits}")


@dataclass(frozen=True)
class UDecompositionInstance:
    circuit: Circuit
    sigma: PauliString
    delta: float
    part: str = "Re"

    def __post_init__(self):
        _check_part(self.part)
        _check_sigma(self.circuit, self.sigma)


@dataclass(frozen=True)
class HDecompositionInstance:
    terms: tuple[tuple[complex, Circuit], ...]
    sigma: PauliString
    delta: float
    part: str = "Re"

    def __post_init__(self):
        _check_part(self.part)
        object.__setattr__(self, "terms", tuple((complex(c), u) for c, u in self.terms))
        for _, u in self.terms:
            _check_sigma(u, self.sigma)

    @property
    def coefficients(self) -> tuple[complex, ...]:
        return tuple(c for c, _ in self.terms)

    def dense(self) -> np.ndarray:
        """``sum_i c_i U_i`` as a matrix."""
        _dense_capacity(self.sigma.num_qubits)
        return sum(c * circuit_unitary(u) for c, u in self.terms)

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"coeff_re": c.real, "coeff_im": c.imag, "circuit": u.to_dict()} for c, u in self.terms
            ],
            "sigma": str(self.sigma),
            "delta": self.delta,
            "part": self.part,
        }

    @classmethod
    def from_dict(cls, data) -> HDecompositionInstance:
        if not isinstance(data, dict) or set(data) != {"terms", "sigma", "delta", "part"}:
            raise SchemaError("H-decomposition JSON needs 'terms', 'sigma', 'delta' and 'part'")
        if not isinstance(data["terms"], list):
            raise SchemaError("'terms' must be a list")
        terms = []
        for t in data["terms"]:
            if not isinstance(t, dict) or set(t) != {"coeff_re", "coeff_im", "circuit"}:
                raise SchemaError("each term needs 'coeff_re', 'coeff_im' and 'circuit'")
            terms.append((complex(float(t["coeff_re"]), float(t["coeff_im"])), Circuit.from_dict(t["circuit"])))
        try:
            return cls(tuple(terms), parse(data["sigma"]), float(data["delta"]), data["part"])
        except (ValueError, TypeError) as exc:
            raise SchemaError(str(exc)) from None


def reduce(u: UDecompositionInstance) -> HDecompositionInstance:
    """Rewrite the instance so the answer is always the real part of the new trace."""
    U, Ud = u.circuit, dagger(u.circuit)
    if u.part == "Re":
        terms = ((0.5, U), (0.5, Ud))
    else:
        terms = ((-0.5j, U), (0.5j, Ud))
    return HDecompositionInstance(terms, u.sigma, u.delta, "Re")


def _dense_capacity(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense capacity of {MAX_QUBITS}")


def pauli_coefficient(U: Circuit, sigma: PauliString) -> complex:
    """``tr(sigma U) / 2^N``, the coefficient of ``sigma`` in the Pauli expansion of ``U``."""
    _check_sigma(U, sigma)
    _dense_capacity(U.num_qubits)
    m = circuit_unitary(U)
    return complex(np.trace(sigma.to_matrix() @ m)) / 2**U.num_qubits


@dataclass(frozen=True)
class ReductionReport:
    trace: complex  # tr(sigma U)
    re_side: float  # Re tr(sigma (U + U^dag) / 2)
    im_side: float  # Re tr(sigma i (U^dag - U) / 2)
    hermiticity: float  # max |M - M^dag| over both combinations

    @property
    def re_error(self) -> float:
        return abs(self.re_side - self.trace.real)

    @property
    def im_error(self) -> float:
        return abs(self.im_side - self.trace.imag)

    @property
    def max_discrepancy(self) -> float:
        return max(self.re_error, self.im_error)

    def to_dict(self) -> dict:
        return {
            "trace": [self.trace.real, self.trace.imag],
            "re_side": self.re_side,
            "im_side": self.im_side,
            "re_error": self.re_error,
            "im_error": self.im_error,
            "hermiticity": self.hermiticity,
            "max_discrepancy": self.max_discrepancy,
        }


def verify_reduction(u: UDecompositionInstance) -> ReductionReport:
    """Evaluate both sides of the two trace identities with dense matrices."""
    _dense_capacity(u.circuit.num_qubits)
    s = u.sigma.to_matrix()
    m = circuit_unitary(u.circuit)
    trace = complex(np.trace(s @ m))
    sides = []
    herm = 0.0
    for part in PARTS:
        h = reduce(UDecompositionInstance(u.circuit, u.sigma, u.delta, part))
        M = h.dense()
        herm = max(herm, float(np.abs(M - M.conj().T).max()))
        sides.append(complex(np.trace(s @ M)).real)
    return ReductionReport(trace, sides[0], sides[1], herm)


def read_instance(source: str | Path | IO[str]) -> HDecompositionInstance:
    try:
        if hasattr(source, "read"):
            data = json.load(source)
        else:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return HDecompositionInstance.from_dict(data)


def write_instance(h: HDecompositionInstance, target: str | Path | IO[str]) -> None:
    if hasattr(target, "write"):
        json.dump(h.to_dict(), target, indent=1)
        target.write("\n")
    else:
        with open(target, "w", encoding="utf-8") as fh:
            write_instance(h, fh)
