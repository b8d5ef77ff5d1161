"""Batched statevector simulation.

States have shape ``(..., 2**n)``; leading axes are independent batch
members (e.g. one per shot). Qubit 0 is the most significant bit of the
amplitude index, matching the dense Pauli convention.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Gate
from .errors import CapacityError

MAX_QUBITS = 14

_S2 = 1 / math.sqrt(2)
_FIXED = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "I": np.eye(2, dtype=complex),
}
_I_POWERS = (1, 1j, -1, -1j)


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "RX":
        return rx(angle)
    if kind in ("RZ", "CRZ"):
        return rz(angle)
    return _FIXED[kind]


def zero_state(num_qubits: int, batch: tuple[int, ...] = ()) -> np.ndarray:
    check_capacity(num_qubits)
    psi = np.zeros(batch + (2**num_qubits,), dtype=complex)
    psi[..., 0] = 1.0
    return psi


def basis_states(num_qubits: int, indices) -> np.ndarray:
    """One computational basis state per entry of ``indices``."""
    check_capacity(num_qubits)
    indices = np.asarray(indices)
    psi = np.zeros(indices.shape + (2**num_qubits,), dtype=complex)
    np.put_along_axis(psi, indices[..., None], 1.0, axis=-1)
    return psi


def check_capacity(num_qubits: int) -> None:
    if num_qubits > MAX_QUBITS:
        raise CapacityError(f"{num_qubits} qubits exceeds the statevector capacity of {MAX_QUBITS}")


def _apply_1q(psi: np.ndarray, u: np.ndarray, target: int, controls: tuple[int, ...], n: int) -> None:
    """In place: ``u`` on ``target`` when every control qubit is 1. ``psi`` is (B, 2, ..., 2)."""
    idx = [slice(None)] * (n + 1)
    for c in controls:
        idx[1 + c] = 1
    idx = tuple(idx)
    sub = psi[idx]
    ax = 1 + target - sum(1 for c in controls if c < target)
    psi[idx] = np.moveaxis(np.tensordot(u, sub, axes=([1], [ax])), 0, ax)


def _apply(psi: np.ndarray, gate: Gate, n: int, controls: tuple[int, ...]) -> None:
    k, q = gate.kind, gate.qubits
    if k in ("CX", "CRZ"):
        _apply_1q(psi, gate_matrix("X" if k == "CX" else "RZ", gate.angle), q[1], controls + (q[0],), n)
    elif k == "CPAULI":
        ctrl = controls + (q[0],)
        for letter, t in zip(gate.pauli, q[1:]):
            if letter != "I":
                _apply_1q(psi, _FIXED[letter], t, ctrl, n)
        if gate.phase:
            phase = np.diag([1, _I_POWERS[gate.phase]]).astype(complex)
            _apply_1q(psi, phase, q[0], controls, n)
    else:
        _apply_1q(psi, gate_matrix(k, gate.angle), q[0], controls, n)


def _as_batch(state: np.ndarray, n: int) -> tuple[np.ndarray, tuple[int, ...]]:
    state = np.asarray(state, dtype=complex)
    if state.shape[-1] != 2**n:
        raise ValueError(f"state has {state.shape[-1]} amplitudes, expected {2**n}")
    lead = state.shape[:-1]
    return state.reshape((-1,) + (2,) * n), lead


def apply_gate(state: np.ndarray, gate: Gate, num_qubits: int | None = None, control: int | None = None) -> np.ndarray:
    """Return ``gate`` applied to ``state``; with ``control`` the gate is conditioned on that qubit."""
    n = num_qubits if num_qubits is not None else int(round(math.log2(np.shape(state)[-1])))
    if max(gate.qubits) >= n or min(gate.qubits) < 0:
        raise IndexError(f"gate {gate.kind}{gate.qubits} outside {n} qubits")
    if control is not None and (control in gate.qubits or not 0 <= control < n):
        raise IndexError(f"invalid control qubit {control}")
    psi, lead = _as_batch(state, n)
    psi = psi.copy()
    _apply(psi, gate, n, () if control is None else (control,))
    return psi.reshape(lead + (2**n,))


def run_circuit(
    state: np.ndarray,
    circuit: Circuit,
    *,
    offset: int = 0,
    num_qubits: int | None = None,
    control: int | None = None,
) -> np.ndarray:
    """Apply ``circuit`` to qubits ``offset .. offset + circuit.num_qubits - 1`` of ``state``."""
    n = circuit.num_qubits + offset if num_qubits is None else num_qubits
    check_capacity(n)
    psi, lead = _as_batch(state, n)
    psi = psi.copy()
    controls = () if control is None else (control,)
    for g in circuit.gates:
        _apply(psi, g.shifted(offset) if offset else g, n, controls)
    return psi.reshape(lead + (2**n,))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of ``circuit`` (columns are images of basis states)."""
    n = circuit.num_qubits
    out = run_circuit(np.eye(2**n, dtype=complex), circuit)
    return out.T


def controlled_unitary(circuit: Circuit) -> np.ndarray:
    """Dense ``|0><0| (x) I + |1><1| (x) U`` with the control as the new qubit 0."""
    n = circuit.num_qubits + 1
    out = run_circuit(np.eye(2**n, dtype=complex), circuit, offset=1, control=0)
    return out.T


def as_tensor(state: np.ndarray, num_qubits: int) -> np.ndarray:
    """Copy of ``state`` reshaped to ``(batch, 2, ..., 2)`` for :func:`apply_gates`."""
    psi, _ = _as_batch(state, num_qubits)
    return psi.copy()


def apply_gates(tensor: np.ndarray, gates, num_qubits: int, control: int | None = None) -> None:
    """Apply ``gates`` in place to a ``(batch, 2, ..., 2)`` tensor."""
    controls = () if control is None else (control,)
    for g in gates:
        _apply(tensor, g, num_qubits, controls)
