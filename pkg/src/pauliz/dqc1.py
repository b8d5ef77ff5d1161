"""One-clean-qubit trace estimation for complex inverse temperatures.

The clean qubit (qubit 0 of the simulated register) is put in ``|+>``, a
controlled ``V`` acts on a register prepared in a uniformly random basis
state ``|x>``, and the clean qubit's ``X`` or ``Y`` expectation equals
``Re <x|V|x>`` or ``Im <x|V|x>``. Averaging over ``x`` gives ``tr(V) / 2^N``.

Imaginary-time factors ``exp(c P)`` are not unitary. Each is implemented
in the aggregate: with probability ``p_I`` nothing happens and with
probability ``p_P`` the controlled ``sign(c) P`` fires, so the average
circuit is ``exp(c P) / e^{|c|}``. Real-time factors ``exp(i a P)`` are
ordinary rotation gadgets.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import streams
from .circuit import Circuit, Gate
from .errors import CapacityError, InfeasibleError
from .hamiltonian import (
    ADDITIVE_COMPLEX,
    InverseTemperature,
    PauliHamiltonian,
    TrotterPlan,
    plan_trotter_additive,
)
from .pauli import PauliString
from .sampler import MAX_SHOTS, EstimateReport, Lemma1Split, lemma1_split
from .statevector import apply_gates, check_capacity, circuit_unitary, controlled_unitary

PARTS = ("Re", "Im")
MODES = ("expectation", "measurement")
BLOCK = 256
_Y_ANGLE = math.pi / 2


# -- gadgets -----------------------------------------------------------------


def _basis_layer(pauli: PauliString, offset: int = 0) -> tuple[list[Gate], list[Gate]]:
    """Gates rotating ``pauli``'s letters to Z, and the gates undoing that."""
    into, back = [], []
    for q in pauli.support:
        letter = pauli.letter(q)
        if letter == "X":
            into.append(Gate("H", (q + offset,)))
            back.append(Gate("H", (q + offset,)))
        elif letter == "Y":
            into.append(Gate("RX", (q + offset,), angle=_Y_ANGLE))
            back.append(Gate("RX", (q + offset,), angle=-_Y_ANGLE))
    return into, back


def _ladder(pauli: PauliString, offset: int = 0) -> list[Gate]:
    s = pauli.support
    return [Gate("CX", (a + offset, b + offset)) for a, b in zip(s, s[1:])]


def _conjugate(pauli: PauliString, centre: Gate, offset: int = 0) -> list[Gate]:
    into, back = _basis_layer(pauli, offset)
    ladder = _ladder(pauli, offset)
    return into + ladder + [centre] + ladder[::-1] + back


def _require_nonidentity(pauli: PauliString) -> None:
    if pauli.is_identity:
        raise ValueError("identity Pauli has no gadget; it contributes a scalar")


def build_real_gadget(theta: float, pauli: PauliString) -> Circuit:
    """Circuit for ``exp(-i theta P)``: basis change, CNOT ladder, ``RZ(2 theta)``."""
    _require_nonidentity(pauli)
    if not math.isfinite(theta):
        raise ValueError("angle must be finite")
    target = pauli.support[-1]
    return Circuit(pauli.num_qubits, _conjugate(pauli, Gate("RZ", (target,), angle=2.0 * theta)))


def build_controlled_real_gadget(theta: float, pauli: PauliString) -> Circuit:
    """Controlled ``exp(-i theta P)`` with the control as qubit 0; only the centre is controlled."""
    _require_nonidentity(pauli)
    target = pauli.support[-1] + 1
    centre = Gate("CRZ", (0, target), angle=2.0 * theta)
    return Circuit(pauli.num_qubits + 1, _conjugate(pauli, centre, offset=1))


@dataclass(frozen=True)
class ImaginaryGadget:
    """``exp(c P)`` as a probabilistic choice between two unitary branches.

    ``exp(c P) = scale * (p_identity * I + p_pauli * sign * P)``. The
    uncontrolled Pauli branch circuit implements ``P``; ``sign`` is a global
    phase there but becomes a relative phase once the branch is controlled.
    For the identity Pauli the gadget is the scalar ``e^c`` (``scalar``).
    """

    c: float
    pauli: PauliString
    split: Lemma1Split

    @property
    def scalar(self) -> float | None:
        return math.exp(self.c) if self.pauli.is_identity else None

    @property
    def identity_branch(self) -> Circuit:
        return Circuit(self.pauli.num_qubits)

    @property
    def pauli_branch(self) -> Circuit:
        _require_nonidentity(self.pauli)
        target = self.pauli.support[-1]
        return Circuit(self.pauli.num_qubits, _conjugate(self.pauli, Gate("Z", (target,))))

    @property
    def sign_phase(self) -> int:
        """Power of ``i`` carried by the controlled Pauli branch."""
        return 0 if self.split.sign > 0 else 2

    def controlled_pauli_branch(self) -> Circuit:
        """Controlled ``sign * P`` built around a controlled-Z centre; control is qubit 0."""
        _require_nonidentity(self.pauli)
        target = self.pauli.support[-1] + 1
        centre = Gate("CPAULI", (0, target), pauli="Z", phase=self.sign_phase)
        return Circuit(self.pauli.num_qubits + 1, _conjugate(self.pauli, centre, offset=1))

    def reduced_pauli_branch(self) -> Circuit:
        """The same controlled branch as a single controlled Pauli string."""
        _require_nonidentity(self.pauli)
        s = self.pauli.support
        letters = "".join(self.pauli.letter(q) for q in s)
        gate = Gate("CPAULI", (0,) + tuple(q + 1 for q in s), pauli=letters, phase=self.sign_phase)
        return Circuit(self.pauli.num_qubits + 1, [gate])

    def aggregate_matrix(self) -> np.ndarray:
        """``scale * sum_b p_b * sign_b * U_b``, which reproduces ``exp(c P)``."""
        dim = 2**self.pauli.num_qubits
        if self.pauli.is_identity:
            return self.scalar * np.eye(dim, dtype=complex)
        sp = self.split
        return sp.scale * (
            sp.p_identity * circuit_unitary(self.identity_branch)
            + sp.p_pauli * sp.sign * circuit_unitary(self.pauli_branch)
        )

    def controlled_aggregate_matrix(self, reduced: bool = False) -> np.ndarray:
        """Branch-weighted controlled circuit: ``|0><0| I + |1><1| exp(c P) / e^{|c|}``."""
        sp = self.split
        branch = self.reduced_pauli_branch() if reduced else self.controlled_pauli_branch()
        dim = 2 ** (self.pauli.num_qubits + 1)
        return sp.p_identity * np.eye(dim, dtype=complex) + sp.p_pauli * circuit_unitary(branch)


def build_imaginary_gadget(c: float, pauli: PauliString) -> ImaginaryGadget:
    """Branch-weighted gadget for ``exp(c P)``; an identity ``pauli`` yields the scalar ``e^c``."""
    if pauli.is_identity:
        return ImaginaryGadget(c, pauli, Lemma1Split(1.0, 0.0, 1, math.exp(c)))
    return ImaginaryGadget(c, pauli, lemma1_split(c))


# -- trace estimation --------------------------------------------------------


def _check_part_mode(part: str, mode: str) -> None:
    if part not in PARTS:
        raise ValueError(f"part must be one of {PARTS}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")


def _prepare(num_qubits: int, xs: np.ndarray) -> np.ndarray:
    """Clean qubit in ``|+>`` next to register basis states ``xs``; shape ``(S, 2, ..., 2)``."""
    check_capacity(num_qubits + 1)
    dim = 2**num_qubits
    psi = np.zeros((len(xs), 2, dim), dtype=complex)
    rows = np.arange(len(xs))
    psi[rows, 0, xs] = psi[rows, 1, xs] = 1.0 / math.sqrt(2.0)
    return psi.reshape((len(xs),) + (2,) * (num_qubits + 1))


def _readout(psi: np.ndarray, num_qubits: int, part: str, mode: str, rng) -> np.ndarray:
    """Basis change on the clean qubit, then its Z expectation or a sampled ``+-1``."""
    change = [Gate("H", (0,))] if part == "Re" else [Gate("SDG", (0,)), Gate("H", (0,))]
    apply_gates(psi, change, num_qubits + 1)
    probs = np.abs(psi.reshape(len(psi), 2, -1)) ** 2
    p0 = probs[:, 0].sum(axis=1)
    p1 = probs[:, 1].sum(axis=1)
    if mode == "expectation":
        return p0 - p1
    return np.where(rng.random(len(psi)) < p0 / (p0 + p1), 1.0, -1.0)


def dqc1_values(V: Circuit, part: str, xs: np.ndarray, mode: str = "expectation", rng=None) -> np.ndarray:
    """Per-shot outcomes of the trace circuit for register basis states ``xs``."""
    _check_part_mode(part, mode)
    if mode == "measurement" and rng is None:
        raise ValueError("measurement mode needs an rng")
    n = V.num_qubits
    psi = _prepare(n, np.asarray(xs, dtype=np.int64))
    apply_gates(psi, [g.shifted(1) for g in V.gates], n + 1, control=0)
    return _readout(psi, n, part, mode, rng)


def dqc1_trace(
    V: Circuit,
    part: str,
    shots: int | None = None,
    mode: str = "expectation",
    rng: np.random.Generator | None = None,
    *,
    batch: int = 4096,
) -> float:
    """Estimate ``Re`` or ``Im`` of ``tr(V) / 2^N``.

    With ``shots=None`` every register basis state is used once, which in
    expectation mode gives the exact value.
    """
    _check_part_mode(part, mode)
    n = V.num_qubits
    if n + 1 > 14:
        raise CapacityError(f"{n} + 1 qubits exceeds the statevector capacity of 14")
    dim = 2**n
    if shots is None:
        xs = np.arange(dim)
    else:
        if shots < 1:
            raise ValueError("shots must be positive")
        if rng is None:
            raise ValueError("sampled shots need an rng")
        xs = rng.integers(0, dim, size=shots)
    total = 0.0
    for start in range(0, len(xs), batch):
        total += float(dqc1_values(V, part, xs[start : start + batch], mode, rng).sum())
    return total / len(xs)


# -- complex partition function ----------------------------------------------


@dataclass(frozen=True)
class _PathProgram:
    """Gadgets of the non-identity terms, ready for batched path simulation."""

    num_qubits: int
    nu: int
    real: tuple[tuple[Gate, ...] | None, ...]  # controlled real gadget per term, None if angle is 0
    branch: tuple[tuple[Gate, ...], ...]  # reduced controlled Pauli branch per term
    p_pauli: tuple[float, ...]


def _path_program(H: PauliHamiltonian, plan: TrotterPlan) -> _PathProgram:
    real, branch, probs = [], [], []
    for (_, p), c, a in zip(H.terms, plan.c, plan.real_angles):
        if p.is_identity:
            continue
        # exp(i a P) = exp(-i theta P) with theta = -a
        real.append(tuple(build_controlled_real_gadget(-a, p).gates) if a != 0.0 else None)
        g = build_imaginary_gadget(c, p)
        branch.append(tuple(g.reduced_pauli_branch().gates))
        probs.append(g.split.p_pauli)
    return _PathProgram(H.num_qubits, plan.nu, tuple(real), tuple(branch), tuple(probs))


def sample_path_circuit(H: PauliHamiltonian, plan: TrotterPlan, rng: np.random.Generator) -> Circuit:
    """One sampled controlled ``V`` on ``N + 1`` qubits, control on qubit 0.

    The Pauli branches carry their signs as control phases, so the circuit
    only makes sense in controlled form. Its average over paths is the
    controlled product formula divided by ``e^{|b_R| Omega}``.
    """
    prog = _path_program(H, plan)
    gates: list[Gate] = []
    for _ in range(prog.nu):
        for j in reversed(range(len(prog.branch))):
            if prog.real[j] is not None:
                gates.extend(g for g in prog.real[j])
            if rng.random() < prog.p_pauli[j]:
                gates.extend(prog.branch[j])
    return Circuit(prog.num_qubits + 1, gates)


def _path_values(prog: _PathProgram, part: str, size: int, rng: np.random.Generator) -> np.ndarray:
    n = prog.num_qubits
    xs = rng.integers(0, 2**n, size=size)
    psi = _prepare(n, xs)
    # The matrix product runs left to right in term order, so gates act in reverse.
    order = list(reversed(range(len(prog.branch))))
    for _ in range(prog.nu):
        for j in order:
            if prog.real[j] is not None:
                apply_gates(psi, prog.real[j], n + 1)
            fire = rng.random(size) < prog.p_pauli[j]
            if fire.any():
                sub = psi[fire]
                apply_gates(sub, prog.branch[j], n + 1)
                psi[fire] = sub
    return _readout(psi, n, part, "expectation", rng)


def _block_sum(args) -> float:
    prog, part, seed, block, size = args
    idx = PARTS.index(part)
    return float(_path_values(prog, part, size, streams.stream(seed, idx, block)).sum())


def _run_part(prog: _PathProgram, part: str, n: int, seed: int, workers: int) -> float:
    tasks = [(prog, part, seed, b, min(BLOCK, n - s)) for b, s in enumerate(range(0, n, BLOCK))]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(_block_sum, tasks))
    else:
        sums = [_block_sum(t) for t in tasks]
    total = 0.0
    for s in sums:  # fixed order keeps results independent of the worker count
        total += s
    return total / n


def path_average(
    H: PauliHamiltonian, plan: TrotterPlan, part: str, shots: int, seed: int, *, workers: int = 1
) -> float:
    """Mean clean-qubit outcome over ``shots`` sampled paths and register states."""
    _check_part_mode(part, "expectation")
    return _run_part(_path_program(H, plan), part, shots, seed, workers)


def dqc1_partition_complex(
    H: PauliHamiltonian,
    beta,
    eps_a: float,
    delta: float,
    seed: int | None = None,
    *,
    calibrate: bool | None = None,
    workers: int = 1,
    max_shots: int | None = None,
) -> EstimateReport:
    """Additive-error estimate of ``tr exp(-beta H)`` for complex ``beta``.

    Half of ``eps_a`` goes to the product formula and half to sampling.
    Identity terms contribute the exact scalar ``exp(-beta h)``. The other
    terms are sampled as branch paths; each of the real and imaginary
    parts uses Hoeffding-many shots at failure budget ``delta / 2``, with
    every outcome in ``[-1, 1]`` scaled by ``2^N e^{|b_R| Omega}``.
    With ``calibrate`` (default on up to 10 qubits) the step count is
    doubled until the dense product-formula error meets its half.
    """
    if not eps_a > 0:
        raise ValueError("eps_a must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    b = InverseTemperature.coerce(beta)
    n = H.num_qubits
    check_capacity(n + 1)
    seed = streams.fresh_seed() if seed is None else seed
    eps_at = eps_as = eps_a / 2.0
    if calibrate is None:
        calibrate = n <= 10
    notes = []
    if calibrate:
        from .oracle import calibrate_additive_plan

        plan, factor = calibrate_additive_plan(H, b, eps_at, interleaved=True)
        if factor > 1:
            notes.append(f"step count doubled {factor}x by dense calibration")
    else:
        plan = plan_trotter_additive(H, b, eps_at)
    h_id = sum(h for h, p in H.terms if p.is_identity)
    scalar = complex(np.exp(-complex(b) * h_id))
    omega_nonid = sum(abs(h) for h, p in H.terms if not p.is_identity)
    log_b0 = n * math.log(2.0) + abs(b.real) * omega_nonid
    budgets = {"eps_a": eps_a, "eps_at": eps_at, "eps_as": eps_as, "delta": delta}
    if omega_nonid == 0.0:
        est = scalar * 2.0**n
        notes.append("only identity terms: exact")
        return EstimateReport(est, ADDITIVE_COMPLEX, budgets, 0, 1, plan, seed, notes)
    scale = abs(scalar) * math.exp(log_b0)
    try:
        shots = math.ceil(4.0 * scale**2 * math.log(4.0 / delta) / eps_as**2)
    except OverflowError:
        shots = math.inf
    cap = MAX_SHOTS if max_shots is None else min(max_shots, MAX_SHOTS)
    if not shots <= cap:
        raise InfeasibleError(f"budget infeasible: {shots:.4g} shots per part required", shots)
    prog = _path_program(H, plan)
    re = _run_part(prog, "Re", shots, seed, workers)
    im = _run_part(prog, "Im", shots, seed, workers)
    est = scalar * math.exp(log_b0) * complex(re, im)
    log = [{"part": "Re", "shots": shots, "mean": re}, {"part": "Im", "shots": shots, "mean": im}]
    return EstimateReport(est, ADDITIVE_COMPLEX, budgets, 2 * shots, 1, plan, seed, notes, log)
