"""Dense-matrix ground truth for small systems.

Everything here builds full ``2^N x 2^N`` matrices and is limited to
``MAX_QUBITS``. Each Trotter factor uses the closed form
``exp(c P) = cosh(c) I + sinh(c) P``, which is exact because ``P^2 = I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, PaulizError
from .hamiltonian import (
    InverseTemperature,
    PauliHamiltonian,
    TrotterPlan,
    plan_trotter_additive,
    plan_trotter_multiplicative,
)
from .pauli import PauliString

MAX_QUBITS = 12


def _check_capacity(n: int, limit: int = MAX_QUBITS) -> None:
    if n > limit:
        raise CapacityError(f"{n} qubits exceeds the dense capacity of {limit}")


def pauli_matrix(p: PauliString) -> np.ndarray:
    _check_capacity(p.num_qubits)
    return p.to_matrix()


def dense(H: PauliHamiltonian) -> np.ndarray:
    _check_capacity(H.num_qubits)
    dim = 2**H.num_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for h, p in H.terms:
        out += h * p.to_matrix()
    return out


def exact_partition(H: PauliHamiltonian, beta) -> complex:
    """``sum_i exp(-beta lambda_i)`` over the spectrum of ``H``; ``beta`` may be complex."""
    b = complex(InverseTemperature.coerce(beta))
    try:
        evals = np.linalg.eigvalsh(dense(H))
    except np.linalg.LinAlgError as exc:
        raise PaulizError(f"eigensolver failed: {exc}") from None
    return complex(np.exp(-b * evals).sum())


def _step(H: PauliHamiltonian, factors) -> np.ndarray:
    dim = 2**H.num_qubits
    step = np.eye(dim, dtype=complex)
    for (ci, si), (_, p) in zip(factors, H.terms):
        step = step @ (ci * np.eye(dim) + si * p.to_matrix())
    return step


def trotter_steps(H: PauliHamiltonian, plan: TrotterPlan) -> tuple[np.ndarray, np.ndarray]:
    """One imaginary-time step and one real-time step as dense matrices."""
    _check_capacity(H.num_qubits)
    imag = _step(H, [(math.cosh(c), math.sinh(c)) for c in plan.c])
    real = _step(H, [(math.cos(a), 1j * math.sin(a)) for a in plan.real_angles])
    return imag, real


def exact_trotter(H: PauliHamiltonian, plan: TrotterPlan) -> tuple[np.ndarray, complex]:
    """``T_R T_I`` with each raised to ``nu`` steps, and its trace."""
    imag, real = trotter_steps(H, plan)
    op = np.linalg.matrix_power(imag, plan.nu) @ np.linalg.matrix_power(real, plan.nu)
    return op, complex(np.trace(op))


def interleaved_trotter(H: PauliHamiltonian, plan: TrotterPlan) -> tuple[np.ndarray, complex]:
    """``[prod_j exp(c_j P_j) exp(i a_j P_j)]^nu``, the product the DQC1 circuit builds.

    Because both factors of a term commute, this is the first-order product
    formula for ``exp(-beta H)`` with complex ``beta``.
    """
    _check_capacity(H.num_qubits)
    dim = 2**H.num_qubits
    step = np.eye(dim, dtype=complex)
    for c, a, (_, p) in zip(plan.c, plan.real_angles, H.terms):
        m = p.to_matrix()
        step = step @ (math.cosh(c) * np.eye(dim) + math.sinh(c) * m)
        step = step @ (math.cos(a) * np.eye(dim) + 1j * math.sin(a) * m)
    op = np.linalg.matrix_power(step, plan.nu)
    return op, complex(np.trace(op))


def spectral_norm(M: np.ndarray) -> float:
    """Largest singular value."""
    M = np.asarray(M)
    _check_capacity(int(math.log2(max(M.shape[0], 1))))
    try:
        return float(np.linalg.norm(M, 2))
    except np.linalg.LinAlgError as exc:
        raise PaulizError(f"SVD failed: {exc}") from None


def spectral_norm_power(M: np.ndarray, rtol: float = 1e-12, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value by power iteration on ``M^dagger M``."""
    M = np.asarray(M, dtype=complex)
    G = M.conj().T @ M
    rng = np.random.default_rng(seed)
    v = rng.normal(size=G.shape[0]) + 1j * rng.normal(size=G.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = G @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(nrm - lam) <= rtol * nrm:
            lam = nrm
            break
        lam = nrm
    return math.sqrt(lam)


def calibrate_additive_plan(
    H: PauliHamiltonian, beta, eps_at: float, *, interleaved: bool = False, max_doublings: int = 20
) -> tuple[TrotterPlan, int]:
    """Double the additive plan's ``nu`` until the dense error meets ``eps_at``.

    Returns the plan and the factor applied to the unit-constant count.
    """
    plan = plan_trotter_additive(H, beta, eps_at)
    z = exact_partition(H, beta)
    trace = interleaved_trotter if interleaved else exact_trotter
    factor = 1
    base = plan.nu
    for _ in range(max_doublings + 1):
        _, zt = trace(H, plan)
        if abs(z - zt) <= eps_at:
            return plan, factor
        factor *= 2
        plan = plan.with_steps(H, base * factor, note=f"steps doubled x{factor} after dense check")
    raise PaulizError(f"additive plan still short after {max_doublings} doublings")


@dataclass(frozen=True)
class BoundReport:
    z_exact: complex
    additive_nu: int
    additive_error: float
    additive_budget: float
    additive_constant: float  # error * nu / unit-constant bound numerator
    multiplicative_nu: int | None
    multiplicative_error: float | None
    multiplicative_budget: float | None
    w_norm_power: float | None  # ||W_nu||^nu
    z_trotter: complex | None

    @property
    def additive_ok(self) -> bool:
        return self.additive_error <= self.additive_budget

    @property
    def multiplicative_ok(self) -> bool | None:
        if self.multiplicative_error is None:
            return None
        return self.multiplicative_error <= self.multiplicative_budget

    @property
    def trace_bound_ok(self) -> bool | None:
        if self.w_norm_power is None:
            return None
        return abs(self.z_trotter) <= self.z_exact.real * self.w_norm_power * (1 + 1e-12) + 1e-12

    def to_dict(self) -> dict:
        return {
            "Z": [self.z_exact.real, self.z_exact.imag],
            "additive": {
                "nu": self.additive_nu,
                "error": self.additive_error,
                "budget": self.additive_budget,
                "empirical_constant": self.additive_constant,
                "ok": self.additive_ok,
            },
            "multiplicative": None
            if self.multiplicative_nu is None
            else {
                "nu": self.multiplicative_nu,
                "relative_error": self.multiplicative_error,
                "budget": self.multiplicative_budget,
                "ok": self.multiplicative_ok,
                "W_norm_pow_nu": self.w_norm_power,
                "trace_bound_ok": self.trace_bound_ok,
            },
        }


def error_operator_step(H: PauliHamiltonian, beta: float, nu: int) -> np.ndarray:
    """``W_nu = exp(+beta/nu H) T_1`` for a single imaginary-time step."""
    plan = plan_trotter_multiplicative(H, beta, 1.0).with_steps(H, nu)
    t1, _ = trotter_steps(H, plan)
    evals, vecs = np.linalg.eigh(dense(H))
    forward = (vecs * np.exp(beta / nu * evals)) @ vecs.conj().T
    return forward @ t1


def validate_bounds(H: PauliHamiltonian, beta, eps: float) -> BoundReport:
    """Dense check of both step-count rules and of ``Z_T <= Z ||W_nu||^nu``.

    The additive check runs at the unit-constant step count and reports the
    constant it implies. The multiplicative checks only apply to real ``beta``.
    """
    b = InverseTemperature.coerce(beta)
    z = exact_partition(H, b)
    add_plan = plan_trotter_additive(H, b, eps)
    _, zt_add = exact_trotter(H, add_plan)
    add_err = abs(z - zt_add)
    n = H.num_qubits
    numerator = 2.0**n * abs(b) ** 2 * add_plan.omega**2 * math.exp(abs(b.real) * add_plan.omega)
    constant = add_err * add_plan.nu / numerator if numerator > 0 else 0.0
    if not b.is_real:
        return BoundReport(z, add_plan.nu, add_err, eps, constant, None, None, None, None, None)
    mul_plan = plan_trotter_multiplicative(H, b.real, eps)
    _, zt = exact_trotter(H, mul_plan)
    rel = abs(z - zt) / z.real
    w = error_operator_step(H, b.real, mul_plan.nu)
    wpow = spectral_norm(w) ** mul_plan.nu
    return BoundReport(z, add_plan.nu, add_err, eps, constant, mul_plan.nu, rel, eps, wpow, zt)
