from __future__ import annotations

import io
import math

import numpy as np
import pytest

from conftest import hamiltonian_matrix
from pauliz.errors import CapacityError
from pauliz.hamiltonian import diagnostics, parse_hamiltonian, write_hamiltonian
from pauliz.models import (
    HubbardSpec,
    hubbard_jordan_wigner,
    random_beta,
    random_hamiltonian,
    tfim,
)
from pauliz.oracle import dense, exact_partition

# single-qubit products a*b = phase * c, written out by hand
_TABLE = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def _op_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for la, ca in a.items():
        for lb, cb in b.items():
            coeff = ca * cb
            letters = []
            for x, y in zip(la, lb):
                ph, l = _TABLE[(x, y)]
                coeff *= ph
                letters.append(l)
            key = "".join(letters)
            out[key] = out.get(key, 0) + coeff
    return out


def _op_add(*ops) -> dict:
    out: dict = {}
    for op in ops:
        for k, v in op.items():
            out[k] = out.get(k, 0) + v
    return out


def _scale(op, s):
    return {k: s * v for k, v in op.items()}


def _annihilator(n: int, p: int) -> dict:
    z = "Z" * p
    rest = "I" * (n - p - 1)
    return {z + "X" + rest: 0.5, z + "Y" + rest: 0.5j}


def _dagger(op):
    return {k: np.conj(v) for k, v in op.items()}


def symbolic_hubbard(spec: HubbardSpec) -> dict:
    """Expand the fermionic Hamiltonian symbolically from ladder operators."""
    n = spec.num_qubits
    a = [_annihilator(n, p) for p in range(n)]
    terms = []
    for i, j in spec.bonds():
        for s in (0, 1):
            p, q = 2 * i + s, 2 * j + s
            hop = _op_add(_op_mul(_dagger(a[p]), a[q]), _op_mul(_dagger(a[q]), a[p]))
            terms.append(_scale(hop, -spec.t))
    for site in range(spec.num_sites):
        nu = _op_mul(_dagger(a[2 * site]), a[2 * site])
        nd = _op_mul(_dagger(a[2 * site + 1]), a[2 * site + 1])
        terms.append(_scale(_op_mul(nu, nd), spec.U))
    total = _op_add(*terms)
    return {k: v for k, v in total.items() if abs(v) > 1e-14}


def fermion_matrix(spec: HubbardSpec) -> np.ndarray:
    """Hubbard Hamiltonian in the occupation basis with explicit fermionic signs."""
    n = spec.num_qubits
    dim = 2**n

    def ann(p):
        m = np.zeros((dim, dim))
        bit = n - 1 - p
        for s in range(dim):
            if s >> bit & 1:
                m[s ^ (1 << bit), s] = (-1) ** bin(s >> (bit + 1)).count("1")
        return m

    c = [ann(p) for p in range(n)]
    out = np.zeros((dim, dim))
    for i, j in spec.bonds():
        for s in (0, 1):
            p, q = 2 * i + s, 2 * j + s
            out -= spec.t * (c[p].T @ c[q] + c[q].T @ c[p])
    for site in range(spec.num_sites):
        out += spec.U * (c[2 * site].T @ c[2 * site]) @ (c[2 * site + 1].T @ c[2 * site + 1])
    return out


def test_random_hamiltonian_constraints():
    rng = np.random.default_rng(0)
    sizes = set()
    for _ in range(500):
        H = random_hamiltonian(rng)
        assert 1 <= H.num_qubits <= 3 and 1 <= len(H) <= 4
        assert len(H) <= 4**H.num_qubits - 1
        assert all(not p.is_identity for p in H.paulis)
        assert len(set(H.paulis)) == len(H)
        assert all(-1 <= h <= 1 for h in H.coefficients)
        sizes.add((H.num_qubits, len(H)))
    assert {n for n, _ in sizes} == {1, 2, 3}
    assert {L for _, L in sizes} == {1, 2, 3, 4}


def test_random_hamiltonian_deterministic():
    a = random_hamiltonian(np.random.default_rng(42))
    b = random_hamiltonian(np.random.default_rng(42))
    sa, sb = io.StringIO(), io.StringIO()
    write_hamiltonian(a, sa)
    write_hamiltonian(b, sb)
    assert sa.getvalue() == sb.getvalue()


def test_random_coefficients_centered():
    rng = np.random.default_rng(1)
    hs = np.concatenate([random_hamiltonian(rng).coefficients for _ in range(10_000)])
    assert abs(hs.mean()) <= 3 * math.sqrt(1 / 3) / math.sqrt(len(hs))


def test_random_beta_range():
    rng = np.random.default_rng(2)
    bs = [random_beta(rng) for _ in range(1000)]
    assert min(bs) >= 0.1 and max(bs) <= 2.0


def test_tfim_terms():
    H = tfim(2, 1.5, 0.5)
    assert [(h, str(p)) for h, p in H.terms] == [(-1.5, "ZZ"), (-0.5, "XI"), (-0.5, "IX")]
    assert diagnostics(tfim(4, 1.0, 0.0)).frak_h == 0.0
    with pytest.raises(ValueError):
        tfim(1)


def test_tfim_partition():
    H = tfim(2, 1.0, 1.0)
    evals = np.linalg.eigvalsh(hamiltonian_matrix(H))
    assert exact_partition(H, 1.0).real == pytest.approx(np.exp(-evals).sum(), rel=1e-12)


def test_hubbard_single_site():
    U, beta = 3.0, 0.7
    H = hubbard_jordan_wigner(HubbardSpec(1, 1, 1.0, U))
    np.testing.assert_allclose(np.linalg.eigvalsh(dense(H)), [0, 0, 0, U], atol=1e-12)
    assert exact_partition(H, beta).real == pytest.approx(3 + math.exp(-beta * U))


def test_hubbard_two_site_term_count():
    spec = HubbardSpec(1, 2, 1.0, 4.0)
    H = hubbard_jordan_wigner(spec)
    expected = symbolic_hubbard(spec)
    assert len(expected) == 11
    assert len(H) == 11
    assert {str(p): h for h, p in H.terms} == pytest.approx({k: v.real for k, v in expected.items()})
    assert all(abs(v.imag) < 1e-14 for v in expected.values())


@pytest.mark.parametrize("spec", [HubbardSpec(2, 1, 1.0, 2.5), HubbardSpec(3, 1, 0.7, -1.0), HubbardSpec(2, 2, 1.0, 4.0)])
def test_hubbard_matches_fermion_oracle(spec):
    H = hubbard_jordan_wigner(spec)
    np.testing.assert_allclose(hamiltonian_matrix(H), fermion_matrix(spec), atol=1e-12)


def test_hubbard_bipartite_symmetric_spectrum():
    H = hubbard_jordan_wigner(HubbardSpec(2, 2, 1.0, 0.0))
    ev = np.linalg.eigvalsh(dense(H))
    np.testing.assert_allclose(ev, -ev[::-1], atol=1e-10)


def test_hubbard_transpose_symmetry():
    a = np.linalg.eigvalsh(dense(hubbard_jordan_wigner(HubbardSpec(1, 2, 1.0, 3.0))))
    b = np.linalg.eigvalsh(dense(hubbard_jordan_wigner(HubbardSpec(2, 1, 1.0, 3.0))))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_hubbard_json_round_trip():
    H = hubbard_jordan_wigner(HubbardSpec(2, 2, 0.5, 1.5))
    buf = io.StringIO()
    write_hamiltonian(H, buf)
    buf.seek(0)
    assert parse_hamiltonian(buf) == H
    assert any(p.is_identity for p in H.paulis)


def test_hubbard_limits():
    with pytest.raises(CapacityError):
        hubbard_jordan_wigner(HubbardSpec(4, 4))
    with pytest.raises(ValueError):
        HubbardSpec(0, 2)
    with pytest.raises(ValueError):
        HubbardSpec(1, 1, math.nan)


def test_omega_grows_with_u():
    omegas = [diagnostics(hubbard_jordan_wigner(HubbardSpec(1, 2, 1.0, u))).omega for u in (0.0, 1.0, 2.0, 8.0)]
    assert omegas == sorted(omegas)
