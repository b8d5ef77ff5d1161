"""Command-line front end.

Machine output (JSON or CSV) goes to ``--out`` or stdout; diagnostics go to
stderr. Exit codes: 2 for malformed input, 3 for infeasible budgets, 4 for
capacity limits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import dqc1, models, oracle, reduction, sampler, streams
from .circuit import read_circuit
from .errors import CapacityError, InfeasibleError, PaulizError, SchemaError
from .hamiltonian import (
    InverseTemperature,
    PauliHamiltonian,
    diagnostics,
    parse_hamiltonian,
    plan_trotter_additive,
    plan_trotter_multiplicative,
    split_multiplicative_error,
)
from .pauli import parse

EXIT_SCHEMA = 2
EXIT_INFEASIBLE = 3
EXIT_CAPACITY = 4

CORRECTNESS_COLUMNS = ["instance", "seed", "N", "L", "beta", "Z_exact", "Z_est", "rel_error"]
SWEEP_COLUMNS = [
    "beta_tilde", "U_tilde", "N", "L", "nu", "frak_h", "omega", "shots", "wall_time_s", "Z_exact", "Z_est",
]


# -- argument helpers ----------------------------------------------------------


def parse_beta(text: str) -> InverseTemperature:
    """``"0.5"`` or ``"0.5,0.2"`` (real, imaginary)."""
    parts = text.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise SchemaError(f"cannot parse beta {text!r}") from None
    if len(values) == 1:
        return InverseTemperature(values[0], 0.0)
    if len(values) == 2:
        return InverseTemperature(values[0], values[1])
    raise SchemaError(f"beta takes one or two numbers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_hamiltonian_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--hamiltonian", help="Hamiltonian JSON file")
    g.add_argument("--hubbard", nargs=4, metavar=("LX", "LY", "T", "U"), help="Fermi-Hubbard lattice")
    g.add_argument("--tfim", nargs=3, metavar=("N", "J", "G"), help="transverse-field Ising chain")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="master seed (a fresh one is drawn and recorded if omitted)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: $PAULIZ_WORKERS or 1)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=None)


def load_hamiltonian(args) -> PauliHamiltonian:
    if getattr(args, "hamiltonian", None):
        return parse_hamiltonian(args.hamiltonian)
    if getattr(args, "hubbard", None):
        lx, ly, t, u = args.hubbard
        try:
            spec = models.HubbardSpec(int(lx), int(ly), float(t), float(u))
        except ValueError as exc:
            raise SchemaError(f"bad Hubbard spec: {exc}") from None
        return models.hubbard_jordan_wigner(spec)
    if getattr(args, "tfim", None):
        n, j, g = args.tfim
        try:
            return models.tfim(int(n), float(j), float(g))
        except ValueError as exc:
            raise SchemaError(f"bad Ising spec: {exc}") from None
    raise SchemaError("no Hamiltonian given")


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _workers(args) -> int:
    return streams.default_workers() if args.workers is None else max(1, args.workers)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = streams.fresh_seed()
    return args.seed


def _instance_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1, np.uint64)[0])


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=1, default=_json_default) + "\n", out)


def _emit_csv(columns: list[str], rows: list[dict], out: str | None) -> None:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    _emit(buf.getvalue(), out)


def _json_default(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, InverseTemperature):
        return [o.real, o.imag]
    if isinstance(o, (np.integer, np.floating)):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _z_max(args, H: PauliHamiltonian, beta: float) -> float:
    if args.zmax is not None:
        return args.zmax
    if args.zmax_policy == "exact2x":
        return 2.0 * oracle.exact_partition(H, beta).real
    return sampler.trivial_z_max(H, beta)


# -- commands --------------------------------------------------------------------


def cmd_estimate(args) -> int:
    H = load_hamiltonian(args)
    beta = parse_beta(args.beta)
    seed = _seed(args)
    workers = _workers(args)
    d = diagnostics(H)
    if args.dqc1 or not beta.is_real:
        if not args.dqc1:
            raise SchemaError("complex beta needs --dqc1 (additive-error mode)")
        if args.eps_a is None:
            raise SchemaError("--dqc1 needs --eps-a")
        report = dqc1.dqc1_partition_complex(
            H, beta, args.eps_a, args.delta, seed, workers=workers, max_shots=args.max_shots
        )
    else:
        z_max = _z_max(args, H, beta.real)
        report = sampler.estimate_partition(
            H, beta.real, args.eps_m, args.delta, z_max, seed, workers=workers, max_shots=args.max_shots
        )
    out = {
        "config": _config(args),
        "diagnostics": d.to_dict(),
        "nu": report.plan.nu,
        "omega": d.omega,
        "frak_h": d.frak_h,
        **report.to_dict(),
    }
    if args.check_exact:
        if H.num_qubits > oracle.MAX_QUBITS:
            print(f"skipping exact check: {H.num_qubits} qubits", file=sys.stderr)
        else:
            z = oracle.exact_partition(H, beta)
            est = complex(report.estimate)
            out["Z_exact"] = z if not beta.is_real else z.real
            out["abs_error"] = abs(est - z)
            out["rel_error"] = abs(est - z) / abs(z) if z != 0 else math.inf
    _emit_json(out, args.out)
    return 0


def cmd_plan(args) -> int:
    H = load_hamiltonian(args)
    d = diagnostics(H)
    betas = args.betas or [1.0]
    rows = []
    for b in betas:
        for e in args.eps_mt:
            plan = plan_trotter_multiplicative(H, b, e)
            rows.append({"mode": "multiplicative", "beta": b, "eps": e, "nu": plan.nu})
        for e in args.eps_a or []:
            plan = plan_trotter_additive(H, b, e)
            rows.append({"mode": "additive", "beta": b, "eps": e, "nu": plan.nu})
    if args.format == "csv":
        _emit_csv(["mode", "beta", "eps", "nu"], rows, args.out)
    else:
        _emit_json({"config": _config(args), "diagnostics": d.to_dict(), "plans": rows}, args.out)
    return 0


def cmd_exact(args) -> int:
    H = load_hamiltonian(args)
    beta = parse_beta(args.beta)
    z = oracle.exact_partition(H, beta)
    evals = np.linalg.eigvalsh(oracle.dense(H))
    out = {
        "config": _config(args),
        "Z": z.real if beta.is_real else z,
        "spectrum_min": float(evals[0]),
        "spectrum_max": float(evals[-1]),
    }
    if args.eps is not None:
        out["bounds"] = oracle.validate_bounds(H, beta, args.eps).to_dict()
    _emit_json(out, args.out)
    return 0


def run_correctness(
    instances: int, seed: int, eps_ms: float, eps_mt: float, delta: float, workers: int = 1
) -> list[dict]:
    """Random-instance correctness experiment; one row per instance."""
    rows = []
    for i in range(instances):
        s = _instance_seed(seed, i)
        rng = streams.stream(s, 0)
        H = models.random_hamiltonian(rng)
        beta = models.random_beta(rng)
        z = oracle.exact_partition(H, beta).real
        report = sampler.estimate_partition(
            H, beta, (1 + eps_ms) * (1 + eps_mt) - 1, delta, 2.0 * z, s,
            eps_split=(eps_ms, eps_mt), workers=workers,
        )
        rows.append({
            "instance": i,
            "seed": s,
            "N": H.num_qubits,
            "L": len(H),
            "beta": beta,
            "Z_exact": z,
            "Z_est": report.estimate,
            "rel_error": abs(report.estimate - z) / z,
        })
    return rows


def cmd_experiment_correctness(args) -> int:
    seed = _seed(args)
    rows = run_correctness(args.instances, seed, args.eps_ms, args.eps_mt, args.delta, _workers(args))
    bad = sum(1 for r in rows if r["rel_error"] > (1 + args.eps_ms) * (1 + args.eps_mt) - 1)
    print(f"seed {seed}: {len(rows) - bad}/{len(rows)} within the relative budget", file=sys.stderr)
    if args.format == "json":
        _emit_json({"config": _config(args), "rows": rows}, args.out)
    else:
        _emit_csv(CORRECTNESS_COLUMNS, rows, args.out)
    return 0


def run_sweep(
    lx: int,
    ly: int,
    betas_tilde: list[float],
    us_tilde: list[float],
    *,
    t: float,
    eps_ms: float,
    eps_mt: float,
    delta: float,
    seed: int,
    estimate: bool,
    max_shots: int | None,
    workers: int = 1,
) -> list[dict]:
    """Hubbard grid over dimensionless ``beta t`` and ``U / t``."""
    rows = []
    k = 0
    for u_t in us_tilde:
        H = models.hubbard_jordan_wigner(models.HubbardSpec(lx, ly, t, u_t * t))
        d = diagnostics(H)
        for b_t in betas_tilde:
            beta = b_t / t
            plan = plan_trotter_multiplicative(H, beta, eps_mt)
            z = oracle.exact_partition(H, beta).real if H.num_qubits <= oracle.MAX_QUBITS else math.nan
            row = {
                "beta_tilde": b_t, "U_tilde": u_t, "N": H.num_qubits, "L": len(H), "nu": plan.nu,
                "frak_h": d.frak_h, "omega": d.omega, "shots": "", "wall_time_s": "", "Z_exact": z, "Z_est": "",
            }
            if estimate:
                z_max = 2.0 * z if math.isfinite(z) else sampler.trivial_z_max(H, beta)
                start = time.perf_counter()
                try:
                    rep = sampler.estimate_multiplicative(
                        H, beta, eps_ms, delta, z_max, _instance_seed(seed, k),
                        plan=plan, workers=workers, max_shots=max_shots,
                    )
                    row["shots"] = rep.shots_used
                    row["Z_est"] = rep.estimate
                except InfeasibleError as exc:
                    print(f"beta~={b_t}, U~={u_t}: {exc}", file=sys.stderr)
                    row["Z_est"] = math.nan
                row["wall_time_s"] = time.perf_counter() - start
            rows.append(row)
            k += 1
    return rows


def cmd_experiment_sweep(args) -> int:
    seed = _seed(args)
    rows = run_sweep(
        args.lx, args.ly, args.betas_tilde, args.u_tilde, t=args.t, eps_ms=args.eps_ms, eps_mt=args.eps_mt,
        delta=args.delta, seed=seed, estimate=not args.plan_only, max_shots=args.max_shots,
        workers=_workers(args),
    )
    if args.format == "json":
        _emit_json({"config": _config(args), "rows": rows}, args.out)
    else:
        _emit_csv(SWEEP_COLUMNS, rows, args.out)
    return 0


def cmd_reduce(args) -> int:
    circuit = read_circuit(args.circuit)
    try:
        sigma = parse(args.sigma) if args.sigma else parse("I" * circuit.num_qubits)
        inst = reduction.UDecompositionInstance(circuit, sigma, args.delta, args.part)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    out = reduction.reduce(inst).to_dict()
    if args.verify:
        out["verification"] = reduction.verify_reduction(inst).to_dict()
    _emit_json(out, args.out)
    return 0


def _pauli_exp(c: complex, P: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(P)
    return (v * np.exp(c * w)) @ v.conj().T


def run_gadget_check(max_qubits: int, samples: int, seed: int) -> dict:
    """Largest deviation of every gadget from the dense exponential."""
    from .pauli import all_paulis
    from .statevector import circuit_unitary

    rng = streams.stream(seed, 0)
    real_err = imag_err = ctrl_err = 0.0
    count = 0
    for n in range(1, max_qubits + 1):
        for p in all_paulis(n, include_identity=False):
            M = p.to_matrix()
            for _ in range(samples):
                theta, c = rng.uniform(-math.pi, math.pi), rng.uniform(-2.0, 2.0)
                real = circuit_unitary(dqc1.build_real_gadget(theta, p))
                real_err = max(real_err, float(np.abs(real - _pauli_exp(-1j * theta, M)).max()))
                g = dqc1.build_imaginary_gadget(c, p)
                imag_err = max(imag_err, float(np.abs(g.aggregate_matrix() - _pauli_exp(c, M)).max()))
                dim = 2**n
                target = np.zeros((2 * dim, 2 * dim), dtype=complex)
                target[:dim, :dim] = np.eye(dim)
                target[dim:, dim:] = _pauli_exp(c, M) / math.exp(abs(c))
                ctrl_err = max(ctrl_err, float(np.abs(g.controlled_aggregate_matrix() - target).max()))
                count += 1
    return {"cases": count, "real_max_error": real_err, "imaginary_max_error": imag_err,
            "controlled_imaginary_max_error": ctrl_err}


def cmd_gadget_check(args) -> int:
    if args.max_qubits > 6:
        raise CapacityError("gadget check is limited to 6 qubits")
    res = run_gadget_check(args.max_qubits, args.samples, _seed(args))
    res["config"] = _config(args)
    res["ok"] = max(res["real_max_error"], res["imaginary_max_error"], res["controlled_imaginary_max_error"]) < 1e-10
    _emit_json(res, args.out)
    return 0 if res["ok"] else 1


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pauliz", description="Partition functions of Pauli Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="Monte Carlo estimate of Z")
    _add_hamiltonian_args(p)
    p.add_argument("--beta", required=True, help="inverse temperature, 're' or 're,im'")
    p.add_argument("--eps-m", type=_positive, default=0.098, help="total relative error (real beta)")
    p.add_argument("--eps-a", type=_positive, help="additive error (with --dqc1)")
    p.add_argument("--delta", type=float, default=0.15)
    p.add_argument("--zmax", type=_positive)
    p.add_argument("--zmax-policy", choices=("trivial", "exact2x"), default="trivial")
    p.add_argument("--dqc1", action="store_true", help="simulate the one-clean-qubit estimator")
    p.add_argument("--check-exact", action="store_true")
    p.add_argument("--max-shots", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("plan", help="diagnostics and Trotter step counts")
    _add_hamiltonian_args(p)
    p.add_argument("--betas", type=_float_list)
    p.add_argument("--eps-mt", type=_float_list, default=[0.048])
    p.add_argument("--eps-a", type=_float_list)
    _add_common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("exact", help="dense partition function")
    _add_hamiltonian_args(p)
    p.add_argument("--beta", required=True)
    p.add_argument("--eps", type=_positive, help="also check both step-count rules at this error")
    _add_common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("experiment-correctness", help="random-instance relative error CSV")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--eps-ms", type=_positive, default=0.048)
    p.add_argument("--eps-mt", type=_positive, default=0.048)
    p.add_argument("--delta", type=float, default=0.15)
    _add_common(p)
    p.set_defaults(func=cmd_experiment_correctness)

    p = sub.add_parser("experiment-sweep", help="Hubbard grid over beta*t and U/t")
    p.add_argument("--lx", type=int, default=1)
    p.add_argument("--ly", type=int, default=2)
    p.add_argument("--t", type=_positive, default=1.0)
    p.add_argument("--betas-tilde", type=_float_list, default=[0.25, 0.5])
    p.add_argument("--u-tilde", type=_float_list, default=[1.0, 2.0])
    p.add_argument("--eps-ms", type=_positive, default=0.15)
    p.add_argument("--eps-mt", type=_positive, default=0.15)
    p.add_argument("--delta", type=float, default=0.20)
    p.add_argument("--plan-only", action="store_true", help="skip the Monte Carlo estimate")
    p.add_argument("--max-shots", type=int, default=10**9)
    _add_common(p)
    p.set_defaults(func=cmd_experiment_sweep)

    p = sub.add_parser("reduce", help="rewrite a circuit trace problem as a Hermitian combination")
    p.add_argument("--circuit", required=True, help="circuit JSON file")
    p.add_argument("--sigma", help="Pauli string (default: identity)")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--part", choices=reduction.PARTS, default="Re")
    p.add_argument("--verify", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gadget-check", help="compare gadgets with dense exponentials")
    p.add_argument("--max-qubits", type=int, default=3)
    p.add_argument("--samples", type=int, default=5)
    _add_common(p)
    p.set_defaults(func=cmd_gadget_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (PaulizError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
