"""Built-in verification: oracle triangle and exact op accounting.

Small enough to run on every install; the CLI exposes it as a subcommand.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import FAMILIES, AnsatzSpec, build_ansatz
from .circuit import Circuit, rx
from .gradients import (
    finite_difference_gradient,
    reference_gradient,
    reverse_mode_gradient,
)
from .observable import builtin_observable
from .statevector import init_basis_state

TRIANGLE_REFERENCE_TOL = 1e-11
TRIANGLE_FD_TOL = 1e-6
FD_STEP = 1e-5


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _triangle_checks(rng: np.random.Generator) -> list[CheckResult]:
    results = []
    for num_qubits in (3, 4):
        obs = builtin_observable("z_all", num_qubits)
        input_state = init_basis_state(num_qubits)
        for family in FAMILIES:
            circuit = build_ansatz(AnsatzSpec(family, num_qubits, reps=2))
            theta = rng.uniform(0.0, 2.0 * np.pi, circuit.num_params)
            rev = reverse_mode_gradient(circuit, theta, obs, input_state).values
            ref = reference_gradient(circuit, theta, obs, input_state).values
            fd = finite_difference_gradient(circuit, theta, obs, input_state, FD_STEP).values
            ref_err = float(np.abs(rev - ref).max())
            fd_err = float(np.abs(rev - fd).max())
            name = f"oracle-triangle/{family}/N={num_qubits}"
            if ref_err > TRIANGLE_REFERENCE_TOL:
                results.append(
                    CheckResult(name, False, f"|reverse - reference| = {ref_err:.3e}")
                )
            elif fd_err > TRIANGLE_FD_TOL:
                results.append(
                    CheckResult(name, False, f"|reverse - finite difference| = {fd_err:.3e}")
                )
            else:
                results.append(CheckResult(name, True))
    return results


def _count_checks(rng: np.random.Generator) -> list[CheckResult]:
    results = []
    for num_qubits, p in ((3, 12), (4, 40)):
        circuit = Circuit(
            num_qubits, tuple(rx(i % num_qubits, i) for i in range(p)), p
        )
        theta = rng.uniform(0.0, 2.0 * np.pi, p)
        obs = builtin_observable("z_all", num_qubits)
        input_state = init_basis_state(num_qubits)
        rev = reverse_mode_gradient(circuit, theta, obs, input_state).counters
        ref = reference_gradient(circuit, theta, obs, input_state).counters
        expect = {
            f"op-counts/reverse/P={p}/gate_applies": (rev.gate_applies, 3 * p - 1),
            f"op-counts/reverse/P={p}/clones": (rev.clones, p + 2),
            f"op-counts/reverse/P={p}/inner_products": (rev.inner_products, p),
            f"op-counts/reverse/P={p}/observable_applies": (rev.observable_applies, 1),
            f"op-counts/reference/P={p}/gate_applies": (ref.gate_applies, p * p),
            f"op-counts/reference/P={p}/clones": (ref.clones, p + 1),
        }
        for name, (got, want) in expect.items():
            if got == want:
                results.append(CheckResult(name, True))
            else:
                results.append(CheckResult(name, False, f"got {got}, expected {want}"))
    return results


def run_selftest(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return _triangle_checks(rng) + _count_checks(rng)
