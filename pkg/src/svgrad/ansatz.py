"""Generators for the four benchmark circuit families.

Each family is a layered pattern whose parameter count grows linearly with
the repetition depth; all parameters are unique, numbered in gate order.

* A: rotations only, no entanglement: per layer, Rx on every qubit then Rz
  on every qubit. 2N parameters per layer.
* B: family A plus a descending CNOT chain per layer (control q_{k+1},
  target q_k for k = N-2..0). 2N parameters per layer.
* C: hardware-efficient 2-local pattern: initial Ry then Rz on every
  qubit; each repetition appends an ascending CNOT chain (control q_k,
  target q_{k+1}) followed by Ry then Rz on every qubit. 2N(1 + reps)
  parameters.
* D: per layer, Ry on every qubit then a ring of controlled-Rx gates,
  each with its own parameter. Layer l pairs qubit (j+l) mod N with
  (j+l+1) mod N for j = 0..N-1, so the ring shifts by one position per
  layer, and odd layers swap which side of each pair controls. 2N
  parameters per layer.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate, crx, cx, rx, ry, rz

FAMILIES = ("A", "B", "C", "D")


@dataclass(frozen=True)
class AnsatzSpec:
    family: str
    num_qubits: int
    reps: int


def num_ansatz_params(spec: AnsatzSpec) -> int:
    """Closed-form parameter count: 2N*reps for A, B, D; 2N*(reps+1) for C."""
    two_n = 2 * spec.num_qubits
    if spec.family == "C":
        return two_n * (spec.reps + 1)
    return two_n * spec.reps


def build_ansatz(spec: AnsatzSpec) -> Circuit:
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}, expected one of {FAMILIES}")
    if spec.reps < 1:
        raise ValueError(f"need at least one repetition, got {spec.reps}")
    n = spec.num_qubits
    if spec.family == "A":
        if n < 1:
            raise ValueError("family A needs at least one qubit")
    elif n < 2:
        raise ValueError(f"family {spec.family} needs at least two qubits to entangle")

    gates: list[Gate] = []
    p = 0

    def next_param() -> int:
        nonlocal p
        p += 1
        return p - 1

    if spec.family in ("A", "B"):
        for _ in range(spec.reps):
            gates.extend(rx(q, next_param()) for q in range(n))
            gates.extend(rz(q, next_param()) for q in range(n))
            if spec.family == "B":
                gates.extend(cx(k + 1, k) for k in range(n - 2, -1, -1))
    elif spec.family == "C":
        gates.extend(ry(q, next_param()) for q in range(n))
        gates.extend(rz(q, next_param()) for q in range(n))
        for _ in range(spec.reps):
            gates.extend(cx(k, k + 1) for k in range(n - 1))
            gates.extend(ry(q, next_param()) for q in range(n))
            gates.extend(rz(q, next_param()) for q in range(n))
    else:  # D
        for layer in range(spec.reps):
            gates.extend(ry(q, next_param()) for q in range(n))
            for j in range(n):
                a = (j + layer) % n
                b = (j + layer + 1) % n
                control, target = (a, b) if layer % 2 == 0 else (b, a)
                gates.append(crx(control, target, next_param()))

    circuit = Circuit(n, tuple(gates), p)
    assert p == num_ansatz_params(spec)
    return circuit
