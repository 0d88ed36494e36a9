"""Gradient engines for expectation values of parameterized circuits.

Four routes to the same per-parameter derivatives of <psi(theta)|O|psi(theta)>:

* ``reverse_mode_gradient``: one forward pass, one operator application and
  one backward sweep over the gates; linear in the gate count and constant
  in live state-vectors. Two working states are maintained by a recurrence:
  the bra side carries the operator-applied state rewound gate by gate with
  adjoints, the ket side carries the circuit state with the trailing gates
  undone, and each parameter occurrence contributes
  2 Re(deferred_scalar * <bra|probe>) where the probe is a clone of the ket
  hit with the gate derivative.
* ``reference_gradient``: the faithful quadratic schedule: every parameter
  occurrence rebuilds its derivative-inserted state from the input.
* ``non_hermitian_gradient``: two reverse sweeps (operator and its
  adjoint), combined to the complex derivative of a complex expectation.
* ``finite_difference_gradient``: central differences of the expectation;
  the independent oracle the others are tested against.

Repeated parameter indices are handled by accumulating occurrence
contributions into the shared table entry; ``uniquify_parameters`` exposes
the equivalent rewrite-then-sum pipeline so the shortcut can be validated
against it.

Every engine reports exact primitive-operation counts. For a circuit of P
single-parameter gates the reverse schedule performs 3P-1 gate applications,
P derivative applications, P+2 clones, P inner products and one operator
application; the reference schedule performs P + P(P-1) gate applications.
The report's energy uses one extra inner product that is deliberately not
counted, so those integers stay exact transcriptions of the schedules.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .circuit import (
    Circuit,
    NonInvertibleGateError,
    NonUnitary,
    apply_gate_derivative,
    gate_matrix,
)
from .gates import invert_small_matrix
from .observable import Observable, adjoint_observable, apply_observable, expectation
from .statevector import StateVector, apply_matrix, clone_state, inner_product

DEFAULT_FD_STEP = 1e-5


@dataclass
class OpCounters:
    """Tallies of the primitive operations a gradient call performed."""

    gate_applies: int = 0
    derivative_applies: int = 0
    clones: int = 0
    inner_products: int = 0
    observable_applies: int = 0


@dataclass
class GradientReport:
    """Per-parameter derivatives plus the expectation at the evaluation point."""

    values: np.ndarray
    energy: complex
    counters: OpCounters


class LiveStateAudit:
    """Counts the state-vectors a gradient call holds simultaneously.

    Tracks the algorithm-level working set (the input plus the engine's
    named states); the peak is the constant-memory claim made measurable.
    """

    def __init__(self):
        self.live = 0
        self.peak = 0

    def acquire(self) -> None:
        self.live += 1
        if self.live > self.peak:
            self.peak = self.live

    def release(self) -> None:
        self.live -= 1


def _check_call(circuit: Circuit, params, obs: Observable, input_state: StateVector) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.num_params,):
        raise ValueError(
            f"parameter table has {circuit.num_params} entries, got shape {params.shape}"
        )
    if obs.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"observable acts on {obs.num_qubits} qubits, circuit on {circuit.num_qubits}"
        )
    if input_state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"input state has {input_state.num_qubits} qubits, circuit {circuit.num_qubits}"
        )
    return params


def _bind(circuit: Circuit, params: np.ndarray) -> list[np.ndarray]:
    # theta is fixed for a whole gradient call, so matrices are bound once
    return [gate_matrix(gate, params) for gate in circuit.gates]


def _rewind_matrices(circuit: Circuit, bound: list[np.ndarray], adjoints: list[np.ndarray]):
    """Per-gate matrices that undo each gate: adjoint, or true inverse when non-unitary."""
    rewinds = []
    for i, gate in enumerate(circuit.gates):
        if isinstance(gate.kind, NonUnitary):
            try:
                rewinds.append(invert_small_matrix(bound[i]))
            except ValueError as exc:
                raise NonInvertibleGateError(f"non-invertible gate {i}: {exc}") from exc
        else:
            rewinds.append(adjoints[i])
    return rewinds


def _reverse_sweep(
    circuit: Circuit,
    params: np.ndarray,
    obs: Observable,
    input_state: StateVector,
    counters: OpCounters,
    audit: LiveStateAudit,
) -> tuple[np.ndarray, complex]:
    """Backward-sweep accumulation of deferred_scalar * <bra|probe> per parameter.

    Returns the complex per-parameter sums and the expectation at theta.
    Callers turn the sums into gradients (2 Re for a Hermitian operator).
    """
    bound = _bind(circuit, params)
    adjoints = [m.conj().T for m in bound]
    rewinds = _rewind_matrices(circuit, bound, adjoints)
    sums = np.zeros(circuit.num_params, dtype=complex)

    audit.acquire()  # the borrowed input
    bra = clone_state(input_state, counters)
    audit.acquire()
    for gate, m in zip(circuit.gates, bound):
        apply_matrix(bra, m, gate.targets, gate.controls, counters)
    ket = clone_state(bra, counters)
    audit.acquire()
    bra = apply_observable(bra, obs, counters)
    # uncounted on purpose: the energy is a reporting convenience, not part
    # of the schedule whose costs the counters transcribe
    energy = complex(np.vdot(ket.amplitudes, bra.amplitudes))

    for i in range(len(circuit.gates) - 1, -1, -1):
        gate = circuit.gates[i]
        apply_matrix(ket, rewinds[i], gate.targets, gate.controls, counters)
        for j in range(gate.kind.arity):
            probe = clone_state(ket, counters)
            audit.acquire()
            scalar = apply_gate_derivative(probe, gate, params, j, counters)
            sums[gate.param_refs[j]] += scalar * inner_product(bra, probe, counters)
            audit.release()
        if i > 0:
            apply_matrix(bra, adjoints[i], gate.targets, gate.controls, counters)

    audit.release()
    audit.release()
    audit.release()
    return sums, energy


def reverse_mode_gradient(
    circuit: Circuit,
    params,
    obs: Observable,
    input_state: StateVector,
    audit: LiveStateAudit | None = None,
) -> GradientReport:
    """Full gradient of a Hermitian expectation in one backward sweep.

    Linear in the gate count: for P single-parameter gates, exactly 3P-1
    gate applications and at most four live state-vectors (input, bra, ket,
    probe) whatever P is. Pass an audit to observe the latter.
    """
    if not obs.is_hermitian:
        raise ValueError(
            "observable is not Hermitian; use non_hermitian_gradient for complex expectations"
        )
    params = _check_call(circuit, params, obs, input_state)
    counters = OpCounters()
    sums, energy = _reverse_sweep(
        circuit, params, obs, input_state, counters, audit or LiveStateAudit()
    )
    return GradientReport((2.0 * sums.real).astype(complex), energy, counters)


def reference_gradient(
    circuit: Circuit, params, obs: Observable, input_state: StateVector
) -> GradientReport:
    """The faithful quadratic schedule, kept as the cross-check baseline.

    Builds the operator-applied circuit state once, then rebuilds a
    derivative-inserted state from the input for every parameter occurrence.
    """
    if not obs.is_hermitian:
        raise ValueError(
            "observable is not Hermitian; use non_hermitian_gradient for complex expectations"
        )
    params = _check_call(circuit, params, obs, input_state)
    counters = OpCounters()
    bound = _bind(circuit, params)
    values = np.zeros(circuit.num_params, dtype=complex)

    bra = clone_state(input_state, counters)
    for gate, m in zip(circuit.gates, bound):
        apply_matrix(bra, m, gate.targets, gate.controls, counters)
    psi_amps = bra.amplitudes.copy()
    bra = apply_observable(bra, obs, counters)
    energy = complex(np.vdot(psi_amps, bra.amplitudes))  # uncounted, as in the sweep

    for i, gate in enumerate(circuit.gates):
        for j in range(gate.kind.arity):
            probe = clone_state(input_state, counters)
            for k in range(i):
                other = circuit.gates[k]
                apply_matrix(probe, bound[k], other.targets, other.controls, counters)
            scalar = apply_gate_derivative(probe, gate, params, j, counters)
            for k in range(i + 1, len(circuit.gates)):
                other = circuit.gates[k]
                apply_matrix(probe, bound[k], other.targets, other.controls, counters)
            amp = scalar * inner_product(bra, probe, counters)
            values[gate.param_refs[j]] += 2.0 * amp.real
    return GradientReport(values, energy, counters)


def non_hermitian_gradient(
    circuit: Circuit, params, obs: Observable, input_state: StateVector
) -> GradientReport:
    """Complex gradient of <psi|A|psi> for an arbitrary operator A.

    Two backward sweeps, one with A and one with its adjoint. A sweep with
    operator O accumulates <in|U^dag O^dag V_i|in> (V_i is the circuit with
    gate i replaced by its derivative), so the derivative
    d<A>/dtheta_i = <in|V_i^dag A U|in> + <in|U^dag A V_i|in> is the
    conjugated A-sweep plus the adjoint-operator sweep. For Hermitian A the
    two sweeps coincide and the sum reduces to 2 Re of either.
    """
    params = _check_call(circuit, params, obs, input_state)
    counters = OpCounters()
    audit = LiveStateAudit()
    sums_a, energy = _reverse_sweep(circuit, params, obs, input_state, counters, audit)
    sums_adj, _ = _reverse_sweep(
        circuit, params, adjoint_observable(obs), input_state, counters, audit
    )
    return GradientReport(np.conj(sums_a) + sums_adj, energy, counters)


def finite_difference_gradient(
    circuit: Circuit,
    params,
    obs: Observable,
    input_state: StateVector,
    delta: float = DEFAULT_FD_STEP,
) -> GradientReport:
    """Central-difference gradient: the independent correctness oracle.

    Quadratic cost: every parameter takes two full expectation evaluations
    at theta_k +/- delta.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    params = _check_call(circuit, params, obs, input_state)
    counters = OpCounters()

    def evaluate(theta: np.ndarray) -> complex:
        state = clone_state(input_state, counters)
        bound = _bind(circuit, theta)
        for gate, m in zip(circuit.gates, bound):
            apply_matrix(state, m, gate.targets, gate.controls, counters)
        return expectation(state, obs, counters)

    values = np.zeros(circuit.num_params, dtype=complex)
    for k in range(circuit.num_params):
        shifted = params.copy()
        shifted[k] = params[k] + delta
        plus = evaluate(shifted)
        shifted[k] = params[k] - delta
        minus = evaluate(shifted)
        values[k] = (plus - minus) / (2.0 * delta)
    return GradientReport(values, evaluate(params), counters)


def uniquify_parameters(circuit: Circuit) -> tuple[Circuit, np.ndarray]:
    """Rewrite so every parameter occurrence gets a fresh index in gate order.

    Returns the rewritten circuit and ``merge_map`` with
    ``merge_map[new_index] = original_index``. Evaluate the rewrite with the
    expanded table ``params[merge_map]``; fold its gradient back with
    ``merge_gradient``. Shipped so the accumulation shortcut inside the
    engines can be validated against this literal pipeline.
    """
    new_gates = []
    merge_map: list[int] = []
    for gate in circuit.gates:
        fresh = tuple(range(len(merge_map), len(merge_map) + len(gate.param_refs)))
        merge_map.extend(gate.param_refs)
        new_gates.append(replace(gate, param_refs=fresh))
    rewritten = Circuit(circuit.num_qubits, tuple(new_gates), len(merge_map))
    return rewritten, np.asarray(merge_map, dtype=int)


def merge_gradient(values, merge_map: np.ndarray, num_params: int) -> np.ndarray:
    """Sum per-occurrence gradient entries back onto the original table."""
    out = np.zeros(num_params, dtype=complex)
    np.add.at(out, merge_map, np.asarray(values))
    return out
