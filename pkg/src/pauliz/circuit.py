"""Gate and circuit values over a small gate set closed under adjoint."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from .errors import SchemaError

SINGLE = ("H", "S", "SDG", "X", "Y", "Z")
ROTATIONS = ("RX", "RZ")
KINDS = SINGLE + ROTATIONS + ("CX", "CRZ", "CPAULI")

_ARITY = {k: 1 for k in SINGLE + ROTATIONS} | {"CX": 2, "CRZ": 2}
_SELF_ADJOINT = ("H", "X", "Y", "Z", "CX")


@dataclass(frozen=True)
class Gate:
    """One gate. ``CPAULI`` is ``|0><0| (x) I + |1><1| (x) i^phase P``.

    For ``CPAULI`` the first qubit is the control and ``pauli`` holds one
    letter per remaining qubit. ``CX`` and ``CRZ`` list control then target.
    Rotations follow ``RX(t) = exp(-i t X / 2)`` and ``RZ(t) = exp(-i t Z / 2)``.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    pauli: str | None = None
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CPAULI":
            if not self.pauli or len(self.pauli) != len(self.qubits) - 1 or set(self.pauli) - set("IXYZ"):
                raise ValueError("CPAULI needs one letter per target qubit")
            object.__setattr__(self, "phase", self.phase % 4)
        elif len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} has repeated qubits {self.qubits}")
        if self.kind in ROTATIONS + ("CRZ",):
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")

    def adjoint(self) -> Gate:
        k = self.kind
        if k in _SELF_ADJOINT:
            return self
        if k == "S":
            return Gate("SDG", self.qubits)
        if k == "SDG":
            return Gate("S", self.qubits)
        if k == "CPAULI":
            return Gate(k, self.qubits, pauli=self.pauli, phase=-self.phase)
        return Gate(k, self.qubits, angle=-self.angle)

    def shifted(self, offset: int) -> Gate:
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.angle, self.pauli, self.phase)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.angle is not None:
            out["angle"] = self.angle
        if self.kind == "CPAULI":
            out["pauli"] = self.pauli
            out["phase"] = self.phase
        return out

    @classmethod
    def from_dict(cls, data) -> Gate:
        if not isinstance(data, dict) or "kind" not in data or "qubits" not in data:
            raise SchemaError("gate needs 'kind' and 'qubits'")
        extra = set(data) - {"kind", "qubits", "angle", "pauli", "phase"}
        if extra:
            raise SchemaError(f"unknown gate fields {sorted(extra)}")
        kind = str(data["kind"]).upper()
        qubits = data["qubits"]
        if not isinstance(qubits, list) or not all(isinstance(q, int) and not isinstance(q, bool) for q in qubits):
            raise SchemaError("'qubits' must be a list of integers")
        angle = data.get("angle")
        if angle is not None and (isinstance(angle, bool) or not isinstance(angle, (int, float))):
            raise SchemaError("'angle' must be a number")
        try:
            return cls(kind, tuple(qubits), None if angle is None else float(angle),
                       data.get("pauli"), int(data.get("phase", 0)))
        except (ValueError, TypeError) as exc:
            raise SchemaError(str(exc)) from None


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        for g in self.gates:
            if min(g.qubits) < 0 or max(g.qubits) >= self.num_qubits:
                raise ValueError(f"gate {g.kind}{g.qubits} outside {self.num_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit count mismatch")
        return Circuit(self.num_qubits, self.gates + other.gates)

    def extended(self, gates: Iterable[Gate]) -> Circuit:
        return Circuit(self.num_qubits, self.gates + tuple(gates))

    def to_dict(self) -> dict:
        return {"num_qubits": self.num_qubits, "gates": [g.to_dict() for g in self.gates]}

    @classmethod
    def from_dict(cls, data) -> Circuit:
        if not isinstance(data, dict) or set(data) != {"num_qubits", "gates"}:
            raise SchemaError("circuit JSON needs exactly 'num_qubits' and 'gates'")
        n = data["num_qubits"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise SchemaError("'num_qubits' must be a positive integer")
        if not isinstance(data["gates"], list):
            raise SchemaError("'gates' must be a list")
        gates = tuple(Gate.from_dict(g) for g in data["gates"])
        try:
            return cls(n, gates)
        except ValueError as exc:
            raise SchemaError(str(exc)) from None


def read_circuit(source: str | Path | IO[str]) -> Circuit:
    try:
        if hasattr(source, "read"):
            data = json.load(source)
        else:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return Circuit.from_dict(data)


def write_circuit(circuit: Circuit, target: str | Path | IO[str]) -> None:
    if hasattr(target, "write"):
        json.dump(circuit.to_dict(), target, indent=1)
        target.write("\n")
    else:
        with open(target, "w", encoding="utf-8") as fh:
            write_circuit(circuit, fh)
