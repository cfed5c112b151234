"""Input-driven reservoir circuit: identical 5-gate blocks on disjoint qubit pairs.

Per pair (i, j) one layer applies, in order:
    RX_i(s), RX_j(s), CX_{i,j}, RZ_j(s), CX_{i,j}      with s = a * u.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .qstate import DensityMatrix, UnitaryGate, apply_unitary

_CX_MATRIX = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=np.complex128)

_H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def rx_gate(qubit: int, angle: float) -> UnitaryGate:
    """exp(-i * angle * X / 2)."""
    c, s = cos(angle / 2), sin(angle / 2)
    return UnitaryGate((qubit,), np.array([[c, -1j * s], [-1j * s, c]]))


def rz_gate(qubit: int, angle: float) -> UnitaryGate:
    """exp(-i * angle * Z / 2)."""
    p = np.exp(-1j * angle / 2)
    return UnitaryGate((qubit,), np.array([[p, 0], [0, p.conjugate()]]))


def cx_gate(control: int, target: int) -> UnitaryGate:
    return UnitaryGate((control, target), _CX_MATRIX)


def hadamard_gate(qubit: int) -> UnitaryGate:
    return UnitaryGate((qubit,), _H_MATRIX)


@dataclass(frozen=True)
class SubsystemLayout:
    """Partition of n = 2m qubits into m ordered, disjoint pairs."""

    num_qubits: int
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        n = self.num_qubits
        if n < 2 or n % 2 != 0:
            raise ValueError(f"need an even number of qubits >= 2, got {n}")
        if len(pairs) != n // 2:
            raise ValueError(f"need {n // 2} pairs for {n} qubits, got {len(pairs)}")
        seen = [q for pair in pairs for q in pair]
        if sorted(seen) != list(range(n)):
            raise ValueError(
                f"pairs must cover each qubit 0..{n - 1} exactly once, got {pairs}")

    @classmethod
    def default(cls, num_qubits: int) -> "SubsystemLayout":
        """Adjacent pairing (0,1), (2,3), ..."""
        pairs = tuple((q, q + 1) for q in range(0, num_qubits, 2))
        return cls(num_qubits, pairs)

    @property
    def num_pairs(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, eq=False)
class CircuitLayer:
    """One timestep of the reservoir circuit, bound to an input value."""

    layout: SubsystemLayout
    gates: tuple
    input_value: float
    scale: float


def build_layer(u: float, layout: SubsystemLayout, a: float) -> CircuitLayer:
    """The m identical 5-gate blocks with rotation angle s = a * u."""
    if not np.isfinite(u) or not np.isfinite(a):
        raise ValueError(f"input and scale must be finite, got u={u}, a={a}")
    s = a * u
    gates = []
    for i, j in layout.pairs:
        gates += [rx_gate(i, s), rx_gate(j, s), cx_gate(i, j),
                  rz_gate(j, s), cx_gate(i, j)]
    return CircuitLayer(layout, tuple(gates), float(u), float(a))


def apply_layer(state: DensityMatrix, layer: CircuitLayer) -> DensityMatrix:
    if state.num_qubits != layer.layout.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits, layer expects "
            f"{layer.layout.num_qubits}")
    for gate in layer.gates:
        state = apply_unitary(state, gate)
    return state


def export_qasm(inputs, layout: SubsystemLayout, a: float) -> str:
    """OpenQASM 2.0 program: H-prep, one block per pair per input, measure all.

    Deterministic output; angles printed with 17 significant digits so parsing
    them back recovers a * u exactly.
    """
    inputs = [float(u) for u in inputs]
    if not inputs:
        raise ValueError("need at least one input value")
    n = layout.num_qubits
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{n}];",
        f"creg c[{n}];",
    ]
    for q in range(n):
        lines.append(f"h q[{q}];")
    for u in inputs:
        s = f"{a * u:.17g}"
        for i, j in layout.pairs:
            lines.append(f"rx({s}) q[{i}];")
            lines.append(f"rx({s}) q[{j}];")
            lines.append(f"cx q[{i}],q[{j}];")
            lines.append(f"rz({s}) q[{j}];")
            lines.append(f"cx q[{i}],q[{j}];")
    for q in range(n):
        lines.append(f"measure q[{q}] -> c[{q}];")
    return "\n".join(lines) + "\n"
