"""Hamiltonian data model, commutation diagnostics and Trotter-step planners."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

from .errors import InfeasibleError, SchemaError
from .pauli import PauliString, commutes, format_pauli, parse

# Trotter counts above this are not something any backend can execute.
MAX_STEPS = 2**62

MULTIPLICATIVE_REAL = "multiplicative-real"
ADDITIVE_COMPLEX = "additive-complex"


@dataclass(frozen=True)
class PauliHamiltonian:
    """``H = sum_j h_j P_j`` with real coefficients; term order is the Trotter order."""

    num_qubits: int
    terms: tuple[tuple[float, PauliString], ...] = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        terms = tuple((float(h), p) for h, p in self.terms)
        for h, p in terms:
            if not math.isfinite(h):
                raise ValueError(f"non-finite coefficient {h!r}")
            if p.num_qubits != self.num_qubits:
                raise ValueError(
                    f"term {format_pauli(p)} has {p.num_qubits} qubits, expected {self.num_qubits}"
                )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_labels(cls, pairs: Iterable[tuple[float, str]], num_qubits: int | None = None):
        pairs = [(h, parse(s)) for h, s in pairs]
        if num_qubits is None:
            if not pairs:
                raise ValueError("num_qubits is required for an empty Hamiltonian")
            num_qubits = pairs[0][1].num_qubits
        return cls(num_qubits, tuple(pairs))

    @property
    def coefficients(self) -> list[float]:
        return [h for h, _ in self.terms]

    @property
    def paulis(self) -> list[PauliString]:
        return [p for _, p in self.terms]

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "terms": [{"coeff": h, "pauli": format_pauli(p)} for h, p in self.terms],
        }


@dataclass(frozen=True)
class InverseTemperature:
    """``beta = b_R + i b_I``; ``b_R`` drives imaginary time, ``b_I`` real time."""

    real: float
    imag: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.real) and math.isfinite(self.imag)):
            raise ValueError("inverse temperature must be finite")

    @classmethod
    def coerce(cls, beta) -> InverseTemperature:
        if isinstance(beta, InverseTemperature):
            return beta
        b = complex(beta)
        return cls(b.real, b.imag)

    @property
    def is_real(self) -> bool:
        return self.imag == 0.0

    def __complex__(self) -> complex:
        return complex(self.real, self.imag)

    def __abs__(self) -> float:
        return math.hypot(self.real, self.imag)


@dataclass(frozen=True)
class HamiltonianDiagnostics:
    omega: float
    xi: float
    noncommuting_counts: tuple[int, ...]  # N_k for k = 2..L
    frak_h: float
    num_terms: int
    num_qubits: int

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "xi": self.xi,
            "N_k": list(self.noncommuting_counts),
            "frak_h": self.frak_h,
            "L": self.num_terms,
            "N": self.num_qubits,
        }


@dataclass(frozen=True)
class TrotterPlan:
    """Step count and per-step exponents for a first-order product formula.

    One imaginary-time step applies ``prod_j exp(c[j] P_j)`` and one real-time
    step applies ``prod_j exp(i * real_angles[j] P_j)``, both in term order.
    """

    nu: int
    c: tuple[float, ...]
    real_angles: tuple[float, ...]
    omega: float
    frak_h: float
    error_budget: float
    mode: str
    beta: InverseTemperature
    heuristic: bool = False
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "nu": self.nu,
            "c": list(self.c),
            "real_angles": list(self.real_angles),
            "omega": self.omega,
            "frak_h": self.frak_h,
            "error_budget": self.error_budget,
            "mode": self.mode,
            "beta": [self.beta.real, self.beta.imag],
            "heuristic": self.heuristic,
            "notes": list(self.notes),
        }

    def with_steps(self, H: PauliHamiltonian, nu: int, note: str | None = None) -> TrotterPlan:
        """Same plan for ``H`` re-expressed with ``nu`` steps."""
        c, a = _exponents(H, self.beta, nu)
        notes = self.notes + ((note,) if note else ())
        return TrotterPlan(
            nu, c, a, self.omega, self.frak_h, self.error_budget, self.mode, self.beta,
            heuristic=self.heuristic, notes=notes,
        )


def diagnostics(H: PauliHamiltonian) -> HamiltonianDiagnostics:
    """Omega, xi and the order-dependent non-commutation weight frak_h.

    ``N_k`` counts earlier terms ``z < k`` whose Pauli fails to commute with
    term ``k``. A term always commutes with itself, so ``z = k`` never counts.
    """
    hs = H.coefficients
    ps = H.paulis
    counts = []
    frak_h = 0.0
    for k in range(1, len(ps)):
        n_k = sum(1 for z in range(k) if not commutes(ps[z], ps[k]))
        counts.append(n_k)
        frak_h += abs(hs[k]) * n_k
    omega = sum(abs(h) for h in hs)
    xi = max((abs(h) for h in hs), default=0.0)
    return HamiltonianDiagnostics(omega, xi, tuple(counts), frak_h, len(ps), H.num_qubits)


def split_multiplicative_error(eps_m: float) -> tuple[float, float]:
    """Symmetric split of a total relative error into sampling and Trotter parts.

    Solves ``eps_m = s + t + s*t`` with ``s = t``.
    """
    if eps_m <= 0:
        raise ValueError("eps_m must be positive")
    s = math.sqrt(1.0 + eps_m) - 1.0
    return s, s


def _exponents(H: PauliHamiltonian, beta: InverseTemperature, nu: int):
    c = tuple(-beta.real * h / nu for h in H.coefficients)
    a = tuple(-beta.imag * h / nu for h in H.coefficients)
    return c, a


def plan_trotter_multiplicative(H: PauliHamiltonian, beta: float, eps_mt: float) -> TrotterPlan:
    """Steps for relative Trotter error ``eps_mt`` at real ``beta``.

    ``nu = max(1, ceil(beta^2 * Omega * frak_h / ln(1 + eps_mt)))``.
    """
    if not eps_mt > 0:
        raise ValueError("eps_mT must be positive")
    b = InverseTemperature.coerce(beta)
    if not b.is_real:
        raise ValueError("multiplicative planning needs a real inverse temperature")
    d = diagnostics(H)
    bound = b.real**2 * d.omega * d.frak_h / math.log1p(eps_mt)
    if bound >= MAX_STEPS:
        raise InfeasibleError(f"plan infeasible: needs {bound:.3e} Trotter steps", bound)
    nu = max(1, math.ceil(bound))
    c, a = _exponents(H, b, nu)
    return TrotterPlan(nu, c, a, d.omega, d.frak_h, eps_mt, MULTIPLICATIVE_REAL, b)


def plan_trotter_additive(H: PauliHamiltonian, beta, eps_at: float) -> TrotterPlan:
    """Steps for additive trace error ``eps_at`` at complex ``beta``.

    Uses ``nu = max(1, ceil(2^N |beta|^2 Omega^2 exp(|b_R| Omega) / eps_at))``.
    The constant in front is a choice; ``oracle.calibrate_additive_plan``
    checks it densely on small systems. The result is flagged heuristic.
    """
    if not eps_at > 0:
        raise ValueError("eps_aT must be positive")
    b = InverseTemperature.coerce(beta)
    d = diagnostics(H)
    if d.omega == 0.0 or abs(b) == 0.0:
        nu = 1
    else:
        log_bound = (
            H.num_qubits * math.log(2.0)
            + 2.0 * math.log(abs(b))
            + 2.0 * math.log(d.omega)
            + abs(b.real) * d.omega
            - math.log(eps_at)
        )
        if log_bound >= math.log(MAX_STEPS):
            raise InfeasibleError(
                f"plan infeasible: needs about exp({log_bound:.1f}) Trotter steps", log_bound
            )
        bound = 2.0**H.num_qubits * abs(b) ** 2 * d.omega**2 * math.exp(abs(b.real) * d.omega) / eps_at
        nu = max(1, math.ceil(bound))
    c, a = _exponents(H, b, nu)
    return TrotterPlan(
        nu, c, a, d.omega, d.frak_h, eps_at, ADDITIVE_COMPLEX, b, heuristic=True,
        notes=("unit constant in the additive step bound",),
    )


def expected_runtime_estimate(
    H: PauliHamiltonian,
    beta: float,
    eps_ms: float,
    delta: float,
    z_max: float,
    z_hint: float,
) -> float:
    """Planning heuristic for the sampling cost of the multiplicative estimator.

    ``4^N exp(2 beta Omega) / (eps_ms^2 z_hint^2) * log2(1/delta) * log2(z_max/z_hint)``
    with ``z_hint`` standing in for the unknown partition function.
    """
    for name, v in (("eps_ms", eps_ms), ("delta", delta), ("z_max", z_max), ("z_hint", z_hint)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    omega = diagnostics(H).omega
    n = H.num_qubits
    return (
        4.0**n
        * math.exp(2.0 * beta * omega)
        / (eps_ms**2 * z_hint**2)
        * math.log2(1.0 / delta)
        * math.log2(z_max / z_hint)
    )


# -- JSON ------------------------------------------------------------------


def hamiltonian_from_dict(data) -> PauliHamiltonian:
    if not isinstance(data, dict):
        raise SchemaError("Hamiltonian JSON must be an object")
    if set(data) - {"num_qubits", "terms"} or "num_qubits" not in data or "terms" not in data:
        raise SchemaError("Hamiltonian JSON needs exactly 'num_qubits' and 'terms'")
    n = data["num_qubits"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError("'num_qubits' must be a positive integer")
    if not isinstance(data["terms"], list):
        raise SchemaError("'terms' must be a list")
    terms = []
    for i, t in enumerate(data["terms"]):
        if not isinstance(t, dict) or set(t) != {"coeff", "pauli"}:
            raise SchemaError(f"term {i}: expected keys 'coeff' and 'pauli'")
        coeff = t["coeff"]
        if isinstance(coeff, bool) or not isinstance(coeff, (int, float)):
            raise SchemaError(f"term {i}: coefficient must be a number")
        if not math.isfinite(coeff):
            raise SchemaError(f"term {i}: non-finite coefficient")
        if not isinstance(t["pauli"], str):
            raise SchemaError(f"term {i}: pauli must be a string")
        try:
            p = parse(t["pauli"])
        except ValueError as exc:
            raise SchemaError(f"term {i}: {exc}") from None
        if p.num_qubits != n:
            raise SchemaError(f"term {i}: pauli {t['pauli']!r} has length {p.num_qubits}, expected {n}")
        terms.append((float(coeff), p))
    return PauliHamiltonian(n, tuple(terms))


def _parse_constant(token: str):
    raise SchemaError(f"non-finite number {token} in Hamiltonian JSON")


def parse_hamiltonian(source: str | Path | IO[str]) -> PauliHamiltonian:
    """Read the Hamiltonian JSON format from a path or an open text file."""
    try:
        if hasattr(source, "read"):
            data = json.load(source, parse_constant=_parse_constant)
        else:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh, parse_constant=_parse_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return hamiltonian_from_dict(data)


def write_hamiltonian(H: PauliHamiltonian, target: str | Path | IO[str]) -> None:
    if hasattr(target, "write"):
        json.dump(H.to_dict(), target, indent=1)
        target.write("\n")
    else:
        with open(target, "w", encoding="utf-8") as fh:
            write_hamiltonian(H, fh)


def term_labels(H: PauliHamiltonian) -> Sequence[str]:
    return [format_pauli(p) for p in H.paulis]
