"""Monte Carlo estimation of real-temperature partition functions.

Each factor ``exp(c P)`` of the Trotter product is written as

    exp(c P) = e^|c| * [ p_I * I + p_P * sign(c) * P ],
    p_I = cosh(c) / e^|c|,   p_P = sinh|c| / e^|c|,

so a shot picks identity or ``sign(c) P`` for every factor, multiplies the
picks together and reads off the trace of the resulting phased Pauli. The
shot is an unbiased estimate of the Trotterised trace and is bounded by
``2^N e^{|beta| Omega}``, which is what the Hoeffding sample count uses.

Additive estimates are turned into relative ones by halving the additive
target each round until the estimate clears ``eps_a (1 + 1/eps_mS)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .errors import InfeasibleError, RoundCapError
from .hamiltonian import (
    MULTIPLICATIVE_REAL,
    PauliHamiltonian,
    TrotterPlan,
    plan_trotter_multiplicative,
    split_multiplicative_error,
)
from .pauli import PauliString, PhasedPauli, normalized_trace, num_words

ROUND_CAP = 48
MAX_SHOTS = 2**62
_SENTINEL = np.iinfo(np.int64).max
_RE_I_POWERS = np.array([1, 0, -1, 0], dtype=np.int8)


@dataclass(frozen=True)
class Lemma1Split:
    p_identity: float
    p_pauli: float
    sign: int
    scale: float


def lemma1_split(c: float) -> Lemma1Split:
    """Branch probabilities for ``exp(c P) = cosh(c) I + sinh|c| sign(c) P``."""
    if not math.isfinite(c):
        raise ValueError("exponent must be finite")
    a = abs(c)
    if a == 0.0:
        return Lemma1Split(1.0, 0.0, 1, 1.0)
    e = math.exp(-2.0 * a)
    try:
        scale = math.exp(a)
    except OverflowError:
        scale = math.inf
    return Lemma1Split(0.5 * (1.0 + e), -0.5 * math.expm1(-2.0 * a), 1 if c > 0 else -1, scale)


@dataclass
class EstimateReport:
    estimate: float | complex
    mode: str
    budgets: dict
    shots_used: int
    rounds: int
    plan: TrotterPlan
    seed: int
    notes: list[str] = field(default_factory=list)
    round_log: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        est = self.estimate
        if isinstance(est, complex):
            est = {"re": est.real, "im": est.imag}
        return {
            "estimate": est,
            "mode": self.mode,
            "budgets": dict(self.budgets),
            "shots_used": self.shots_used,
            "rounds": self.rounds,
            "plan": self.plan.to_dict(),
            "seed": self.seed,
            "notes": list(self.notes),
            "round_log": list(self.round_log),
        }


# -- shot tables -------------------------------------------------------------


@dataclass(frozen=True)
class _ShotTable:
    """Per-term data the vectorised path sampler needs, identity terms removed."""

    num_qubits: int
    nu: int
    x: np.ndarray  # (L, W) uint64
    z: np.ndarray
    p: np.ndarray  # branch probability of the Pauli pick
    const_phase: np.ndarray  # sign phase plus the letter phase of the term
    exponent: float  # the per-shot magnitude is 2^N e^{exponent}

    @property
    def bound(self) -> float:
        try:
            return math.ldexp(math.exp(self.exponent), self.num_qubits)
        except OverflowError:
            return math.inf


def _check_real(plan: TrotterPlan) -> None:
    if plan.mode != MULTIPLICATIVE_REAL and plan.beta.imag != 0.0:
        raise ValueError("the classical sampler only handles real inverse temperatures")


def _shot_table(H: PauliHamiltonian, plan: TrotterPlan) -> _ShotTable:
    _check_real(plan)
    if len(plan.c) != len(H):
        raise ValueError("plan does not match the Hamiltonian")
    nw = num_words(H.num_qubits)
    xs, zs, ps, phases = [], [], [], []
    exponent = 0.0
    for c, (_, pauli) in zip(plan.c, H.terms):
        if pauli.is_identity:
            # identity factors are the scalar e^c; fold them in exactly
            exponent += plan.nu * c
            continue
        exponent += plan.nu * abs(c)
        split = lemma1_split(c)
        if split.p_pauli == 0.0:
            continue
        wx, wz = pauli.words()
        xs.append(wx)
        zs.append(wz)
        ps.append(split.p_pauli)
        phases.append((0 if split.sign > 0 else 2) + (pauli.x & pauli.z).bit_count())
    shape = (len(xs), nw)
    return _ShotTable(
        num_qubits=H.num_qubits,
        nu=plan.nu,
        x=np.array(xs, dtype=np.uint64).reshape(shape),
        z=np.array(zs, dtype=np.uint64).reshape(shape),
        p=np.array(ps, dtype=float),
        const_phase=np.array(phases, dtype=np.int64),
        exponent=exponent,
    )


def shot_bound(H: PauliHamiltonian, plan: TrotterPlan) -> float:
    """Largest magnitude a single shot can take."""
    return _shot_table(H, plan).bound


def sample_shot(H: PauliHamiltonian, plan: TrotterPlan, rng: np.random.Generator) -> float:
    """One shot, drawing every branch of every factor in order."""
    table = _shot_table(H, plan)
    acc = PhasedPauli(0, PauliString.identity(H.num_qubits))
    splits = [lemma1_split(c) for c in plan.c]
    for _ in range(plan.nu):
        for split, (_, pauli) in zip(splits, H.terms):
            if pauli.is_identity or split.p_pauli == 0.0:
                continue
            if rng.random() < split.p_pauli:
                acc = acc * PhasedPauli(0 if split.sign > 0 else 2, pauli)
    return table.bound * normalized_trace(acc).real


def _popcount_rows(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=1, dtype=np.int64)


def _event_keys(table: _ShotTable, size: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted ``step * L + term`` keys of the Pauli picks, one row per shot.

    Picks of one term over ``nu`` steps form a Bernoulli process, so their
    positions are cumulative geometric gaps. Unused slots hold a sentinel.
    """
    nu = table.nu
    nterms = len(table.p)
    blocks = []
    for j, p in enumerate(table.p):
        mean = nu * p
        width = int(mean + 4.0 * math.sqrt(mean) + 4.0)
        pos = np.cumsum(rng.geometric(p, size=(size, width)), axis=1) - 1
        parts = [pos]
        last = pos[:, -1]
        pending = np.flatnonzero(last < nu - 1)
        while pending.size:
            more = np.cumsum(rng.geometric(p, size=(pending.size, width)), axis=1) - 1
            more += last[pending, None] + 1
            ext = np.full((size, width), nu, dtype=np.int64)
            ext[pending] = more
            parts.append(ext)
            last = np.full(size, nu, dtype=np.int64)
            last[pending] = more[:, -1]
            pending = pending[more[:, -1] < nu - 1]
        pos = np.concatenate(parts, axis=1)
        blocks.append(np.where(pos < nu, pos * nterms + j, _SENTINEL))
    keys = np.sort(np.concatenate(blocks, axis=1), axis=1)
    used = int((keys != _SENTINEL).sum(axis=1).max(initial=0))
    return keys[:, :used]


def _path_values(table: _ShotTable, size: int, rng: np.random.Generator) -> np.ndarray:
    """Shot values divided by the shot bound: entries of {-1, 0, +1}."""
    nterms = len(table.p)
    if nterms == 0:
        return np.ones(size, dtype=np.int8)
    keys = _event_keys(table, size, rng)
    nw = table.x.shape[1]
    acc_x = np.zeros((size, nw), dtype=np.uint64)
    acc_z = np.zeros((size, nw), dtype=np.uint64)
    acc_k = np.zeros(size, dtype=np.int64)
    for col in range(keys.shape[1]):
        kc = keys[:, col]
        rows = np.flatnonzero(kc != _SENTINEL)
        t = kc[rows] % nterms
        tx = table.x[t]
        tz = table.z[t]
        az = acc_z[rows]
        # Letter phases telescope along the product; only shots that end on the
        # identity are read, so the running phase needs just the cross term.
        acc_k[rows] += 2 * _popcount_rows(az & tx) + table.const_phase[t]
        acc_x[rows] ^= tx
        acc_z[rows] = az ^ tz
    identity = ~(acc_x.any(axis=1) | acc_z.any(axis=1))
    return np.where(identity, _RE_I_POWERS[acc_k % 4], 0).astype(np.int8)


def sample_shots(H: PauliHamiltonian, plan: TrotterPlan, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` shots, identically distributed to repeated :func:`sample_shot`."""
    table = _shot_table(H, plan)
    return table.bound * _path_values(table, n, rng).astype(float)


# -- parallel blocks ---------------------------------------------------------


def _block_size(table: _ShotTable) -> int:
    width = sum(int(table.nu * p + 4.0 * math.sqrt(table.nu * p) + 4.0) for p in table.p)
    size = 1 << 16
    while size > 256 and size * max(width, 1) > 1 << 23:
        size >>= 1
    return size


def _block_sum(args) -> int:
    table, seed, round_index, block, size = args
    values = _path_values(table, size, streams.stream(seed, round_index, block))
    return int(values.sum(dtype=np.int64))


def _run_shots(table: _ShotTable, n: int, seed: int, round_index: int, workers: int) -> int:
    size = _block_size(table)
    tasks = []
    for b, start in enumerate(range(0, n, size)):
        tasks.append((table, seed, round_index, b, min(size, n - start)))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(_block_sum, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        sums = [_block_sum(t) for t in tasks]
    return sum(sums)


# -- estimators --------------------------------------------------------------


def hoeffding_shots(bound: float, eps_a: float, delta: float) -> float:
    """Shots so that a mean of values in ``[-bound, bound]`` is ``eps_a``-close w.p. ``1 - delta``."""
    return math.ceil(2.0 * bound**2 * math.log(2.0 / delta) / eps_a**2)


def _additive_round(table, eps_a, delta, seed, round_index, workers, max_shots):
    bound = table.bound
    try:
        n = hoeffding_shots(bound, eps_a, delta)
    except OverflowError:
        n = math.inf
    cap = MAX_SHOTS if max_shots is None else min(max_shots, MAX_SHOTS)
    if not n <= cap:
        raise InfeasibleError(f"budget infeasible: {n:.4g} shots required", n)
    total = _run_shots(table, n, seed, round_index, workers)
    return bound * total / n, n


def estimate_additive(
    H: PauliHamiltonian,
    plan: TrotterPlan,
    eps_a: float,
    delta: float,
    seed: int | None = None,
    *,
    workers: int = 1,
    max_shots: int | None = None,
) -> EstimateReport:
    """Mean of Hoeffding-many shots; within ``eps_a`` of the Trotter trace w.p. ``1 - delta``."""
    if not eps_a > 0:
        raise ValueError("eps_a must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    seed = streams.fresh_seed() if seed is None else seed
    table = _shot_table(H, plan)
    est, n = _additive_round(table, eps_a, delta, seed, 0, workers, max_shots)
    return EstimateReport(
        estimate=est,
        mode="additive",
        budgets={"eps_a": eps_a, "delta": delta},
        shots_used=n,
        rounds=1,
        plan=plan,
        seed=seed,
        round_log=[{"round": 0, "eps_a": eps_a, "delta": delta, "shots": n, "estimate": est}],
    )


def estimate_multiplicative(
    H: PauliHamiltonian,
    beta: float,
    eps_ms: float,
    delta: float,
    z_max: float,
    seed: int | None = None,
    *,
    plan: TrotterPlan | None = None,
    workers: int = 1,
    max_shots: int | None = None,
) -> EstimateReport:
    """Relative-error estimate of the Trotter trace by successive halving.

    Round ``r`` targets additive error ``eps_ms * z_max / 2^r`` with failure
    budget ``delta / 2^(r+1)`` and stops once the estimate reaches
    ``eps_a (1 + 1/eps_ms)``. ``plan`` defaults to a Trotter plan with
    ``eps_mT = eps_ms``.
    """
    if not eps_ms > 0:
        raise ValueError("eps_mS must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not z_max > 0:
        raise ValueError("z_max must be positive")
    if plan is None:
        plan = plan_trotter_multiplicative(H, beta, eps_ms)
    seed = streams.fresh_seed() if seed is None else seed
    table = _shot_table(H, plan)
    budgets = {"eps_ms": eps_ms, "eps_mt": plan.error_budget, "delta": delta, "z_max": z_max}
    if len(table.p) == 0:
        # every shot equals the bound, so a single shot is the exact Trotter trace
        est = table.bound
        log = [{"round": 0, "shots": 1, "estimate": est, "accepted": True}]
        notes = ["no branching factors: one deterministic shot"]
        return EstimateReport(est, "multiplicative", budgets, 1, 1, plan, seed, notes, log)
    floor = eps_ms * z_max * 2.0**-ROUND_CAP
    log = []
    shots = 0
    r = 0
    while True:
        eps_a = eps_ms * z_max / 2**r
        if eps_a < floor:
            raise RoundCapError(
                "partition function too small relative to Z_max "
                f"(no acceptance after {ROUND_CAP} halvings)",
                r,
            )
        delta_r = delta / 2 ** (r + 1)
        est, n = _additive_round(table, eps_a, delta_r, seed, r, workers, max_shots)
        shots += n
        threshold = eps_a * (1.0 + 1.0 / eps_ms)
        accepted = est >= threshold
        log.append(
            {"round": r, "eps_a": eps_a, "delta": delta_r, "shots": n, "estimate": est, "accepted": accepted}
        )
        if accepted:
            break
        r += 1
    return EstimateReport(
        estimate=est,
        mode="multiplicative",
        budgets=budgets,
        shots_used=shots,
        rounds=r + 1,
        plan=plan,
        seed=seed,
        round_log=log,
    )


def estimate_partition(
    H: PauliHamiltonian,
    beta: float,
    eps_m: float,
    delta: float,
    z_max: float,
    seed: int | None = None,
    *,
    eps_split: tuple[float, float] | None = None,
    workers: int = 1,
    max_shots: int | None = None,
) -> EstimateReport:
    """Estimate ``tr exp(-beta H)`` to relative error ``eps_m`` w.p. ``1 - delta``.

    ``eps_m`` is split evenly between sampling and Trotter error unless
    ``eps_split = (eps_ms, eps_mt)`` is given explicitly.
    """
    if not eps_m > 0:
        raise ValueError("eps_m must be positive")
    eps_ms, eps_mt = split_multiplicative_error(eps_m) if eps_split is None else eps_split
    plan = plan_trotter_multiplicative(H, beta, eps_mt)
    report = estimate_multiplicative(
        H, beta, eps_ms, delta, z_max, seed, plan=plan, workers=workers, max_shots=max_shots
    )
    report.budgets = {"eps_m": eps_m, **report.budgets}
    return report


def trivial_z_max(H: PauliHamiltonian, beta: float) -> float:
    """``2^N e^{|beta| Omega}``: bounds both the partition function and its Trotter trace."""
    omega = sum(abs(h) for h in H.coefficients)
    return 2.0**H.num_qubits * math.exp(abs(beta) * omega)
