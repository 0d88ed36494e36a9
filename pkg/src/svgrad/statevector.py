"""Dense state-vector storage and the mutation primitives everything else builds on.

Indexing is little-endian: qubit 0 is the least significant bit of the
amplitude index. Norm is deliberately not an invariant; operator- and
derivative-applied states are routinely unnormalised and keep flowing
through the same kernels.

Every primitive optionally takes an op-counter object (duck-typed; see
``svgrad.gradients.OpCounters``) and bumps the matching field, so the
gradient engines' cost claims can be checked as exact integer counts.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np


class StateVector:
    """Amplitudes of an ``num_qubits``-qubit register."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        if num_qubits < 1:
            raise ValueError(f"need at least one qubit, got {num_qubits}")
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (1 << num_qubits,):
            raise ValueError(
                f"expected {1 << num_qubits} amplitudes for {num_qubits} qubits, "
                f"got shape {amplitudes.shape}"
            )
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def init_basis_state(num_qubits: int, basis_index: int = 0) -> StateVector:
    """Computational basis state |basis_index> on ``num_qubits`` qubits."""
    if num_qubits < 1:
        raise ValueError(f"need at least one qubit, got {num_qubits}")
    if not 0 <= basis_index < (1 << num_qubits):
        raise ValueError(
            f"basis index {basis_index} out of range for {num_qubits} qubits"
        )
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[basis_index] = 1.0
    return StateVector(num_qubits, amps)


def clone_state(src: StateVector, counters=None) -> StateVector:
    """Deep copy; mutating either state never touches the other."""
    if counters is not None:
        counters.clones += 1
    return StateVector(src.num_qubits, src.amplitudes.copy())


def inner_product(bra: StateVector, ket: StateVector, counters=None) -> complex:
    """<bra|ket> = sum_k conj(bra_k) ket_k. Neither state is modified."""
    if bra.num_qubits != ket.num_qubits:
        raise ValueError(
            f"qubit count mismatch: {bra.num_qubits} vs {ket.num_qubits}"
        )
    if counters is not None:
        counters.inner_products += 1
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


# Index tables keyed by (num_qubits, targets, controls). Each value is a
# (2^k, M) matrix of amplitude indices: column j holds one group of 2^k
# amplitudes that a k-target matrix mixes, restricted to control bits all 1.
_GROUPS: dict[tuple, np.ndarray] = {}
# Amplitude indices with a 0 bit at any of the listed qubits, keyed by
# (num_qubits, qubits).
_PROJ: dict[tuple, np.ndarray] = {}


def _check_qubits(num_qubits: int, qubits: Sequence[int], label: str) -> None:
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise ValueError(f"{label} qubit {q} out of range for {num_qubits} qubits")


def _group_indices(num_qubits: int, targets: tuple[int, ...], controls: tuple[int, ...]) -> np.ndarray:
    key = (num_qubits, targets, controls)
    groups = _GROUPS.get(key)
    if groups is None:
        idx = np.arange(1 << num_qubits)
        keep = np.ones(idx.shape, dtype=bool)
        for t in targets:
            keep &= (idx >> t) & 1 == 0
        for c in controls:
            keep &= (idx >> c) & 1 == 1
        base = idx[keep]
        offsets = np.zeros(1 << len(targets), dtype=np.int64)
        for k, t in enumerate(targets):
            half = 1 << k
            offsets[half : 2 * half] = offsets[:half] + (1 << t)
        groups = base[np.newaxis, :] + offsets[:, np.newaxis]
        _GROUPS[key] = groups
    return groups


def apply_matrix(
    state: StateVector,
    m: np.ndarray,
    targets: Sequence[int],
    controls: Sequence[int] = (),
    counters=None,
) -> None:
    """Multiply a small matrix onto the target qubits, in place.

    Amplitude groups whose control bits are all 1 get the 2^k-subvector
    multiplied by ``m``; every other amplitude is untouched. ``m`` need not
    be unitary. Cost is O(2^N) independent of the matrix content.
    """
    targets = tuple(targets)
    controls = tuple(controls)
    n = state.num_qubits
    _check_qubits(n, targets, "target")
    _check_qubits(n, controls, "control")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits in {targets}")
    if set(targets) & set(controls):
        raise ValueError(f"targets {targets} and controls {controls} overlap")
    if len(targets) not in (1, 2):
        raise ValueError(
            f"native kernels cover 1 or 2 targets, got {len(targets)}; "
            "decompose larger unitaries"
        )
    m = np.asarray(m, dtype=complex)
    dim = 1 << len(targets)
    if m.shape != (dim, dim):
        raise ValueError(f"matrix shape {m.shape} does not act on {len(targets)} targets")
    groups = _group_indices(n, targets, controls)
    amps = state.amplitudes
    amps[groups] = m @ amps[groups]
    if counters is not None:
        counters.gate_applies += 1


def project_to_one(state: StateVector, qubits: Sequence[int]) -> None:
    """Zero every amplitude whose index has a 0 bit at any listed qubit.

    The |1...1><1...1| projector on the listed qubits; the result is
    generally unnormalised. An empty list is the identity.
    """
    qubits = tuple(qubits)
    n = state.num_qubits
    _check_qubits(n, qubits, "projected")
    if not qubits:
        return
    key = (n, qubits)
    zero_idx = _PROJ.get(key)
    if zero_idx is None:
        idx = np.arange(1 << n)
        any_zero = np.zeros(idx.shape, dtype=bool)
        for q in qubits:
            any_zero |= (idx >> q) & 1 == 0
        zero_idx = idx[any_zero]
        _PROJ[key] = zero_idx
    state.amplitudes[zero_idx] = 0.0
