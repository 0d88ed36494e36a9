"""Parameterized circuit representation and per-gate actions.

A circuit is an ordered tuple of gates applied left-to-right onto the ket,
plus the size of its parameter table. Gates reference parameters by table
index; an index may appear in any number of gates.

Gate derivatives follow a deferred-scalar convention: applying the
derivative of a gate mutates the state up to a complex factor which is
returned instead of multiplied in, so the caller can fold it into a final
inner product. Rotation derivatives apply the Pauli product then the bound
rotation and defer alpha*i; the phase-gate derivative is a projection onto
the target's |1> with deferred i*e^{i theta}; entry-wise matrix kinds apply
the (analytic or finite-difference) matrix derivative with deferred 1. With
controls present, the derivative action ends by zeroing every amplitude
whose control bits are not all 1.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import gates as g
from .statevector import StateVector, apply_matrix, project_to_one

ENTRY_DERIV_STEP = 1e-6  # central-difference step for entry-wise matrix derivatives


class CircuitParseError(ValueError):
    """Raised on malformed circuit text; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class NonInvertibleGateError(ValueError):
    """A gate whose bound matrix cannot be inverted, named by circuit index."""


@dataclass(frozen=True)
class PauliRotation:
    """exp(alpha * i * theta * product of one Pauli per target).

    The default alpha = -1/2 gives the usual Rx/Ry/Rz convention,
    Rx(theta) = exp(-i theta X / 2).
    """

    axes: str
    alpha: float = -0.5

    def __post_init__(self):
        if not self.axes or any(a not in "XYZ" for a in self.axes):
            raise ValueError(f"axes must be a nonempty string over XYZ, got {self.axes!r}")

    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True)
class Phase:
    """diag(1, e^{i theta}) on a single target."""

    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True, eq=False)
class FixedUnitary:
    """Parameter-free gate given by an explicit 2x2 or 4x4 matrix."""

    matrix: np.ndarray
    name: str = ""

    @property
    def arity(self) -> int:
        return 0

    def __eq__(self, other):
        if not isinstance(other, FixedUnitary):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.matrix, other.matrix)


@dataclass(frozen=True, eq=False)
class CustomParametric:
    """Unitary given entry-wise by ``matrix_fn(*angles)``.

    ``derivative_fn(which, *angles)``, when provided, must return
    d matrix / d angles[which]; otherwise entries are differentiated by
    central finite difference with step ENTRY_DERIV_STEP.
    """

    matrix_fn: Callable[..., np.ndarray]
    num_params: int = 1
    derivative_fn: Callable[..., np.ndarray] | None = None
    name: str = ""

    @property
    def arity(self) -> int:
        return self.num_params


@dataclass(frozen=True, eq=False)
class NonUnitary:
    """Invertible but non-unitary matrix gate.

    Rewinding such a gate uses the true matrix inverse where a unitary gate
    would use its adjoint; everywhere else it behaves like CustomParametric.
    """

    matrix_fn: Callable[..., np.ndarray]
    num_params: int = 0
    derivative_fn: Callable[..., np.ndarray] | None = None
    invertible: bool = True
    name: str = ""

    @property
    def arity(self) -> int:
        return self.num_params


GateKind = Union[PauliRotation, Phase, FixedUnitary, CustomParametric, NonUnitary]


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    param_refs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "controls", tuple(self.controls))
        object.__setattr__(self, "param_refs", tuple(self.param_refs))
        if set(self.targets) & set(self.controls):
            raise ValueError(f"targets {self.targets} and controls {self.controls} overlap")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets in {self.targets}")
        if len(self.param_refs) != self.kind.arity:
            raise ValueError(
                f"{type(self.kind).__name__} consumes {self.kind.arity} parameter(s), "
                f"got refs {self.param_refs}"
            )
        if isinstance(self.kind, PauliRotation) and len(self.kind.axes) != len(self.targets):
            raise ValueError(
                f"axes {self.kind.axes!r} need {len(self.kind.axes)} targets, got {self.targets}"
            )
        if isinstance(self.kind, Phase) and len(self.targets) != 1:
            raise ValueError(f"phase gates act on one target, got {self.targets}")
        if not 1 <= len(self.targets) <= 2:
            raise ValueError(f"gates act on 1 or 2 targets, got {self.targets}")


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    num_params: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for i, gate in enumerate(self.gates):
            for q in gate.targets + gate.controls:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(f"gate {i}: qubit {q} out of range")
            for p in gate.param_refs:
                if not 0 <= p < self.num_params:
                    raise ValueError(f"gate {i}: parameter index {p} out of range")


# -- convenience constructors ------------------------------------------------

def rx(target: int, param: int, alpha: float = -0.5) -> Gate:
    return Gate(PauliRotation("X", alpha), (target,), (), (param,))


def ry(target: int, param: int, alpha: float = -0.5) -> Gate:
    return Gate(PauliRotation("Y", alpha), (target,), (), (param,))


def rz(target: int, param: int, alpha: float = -0.5) -> Gate:
    return Gate(PauliRotation("Z", alpha), (target,), (), (param,))


def rp(axes: str, targets: tuple[int, ...], param: int, alpha: float = -0.5) -> Gate:
    return Gate(PauliRotation(axes.upper(), alpha), tuple(targets), (), (param,))


def phase_gate(target: int, param: int) -> Gate:
    return Gate(Phase(), (target,), (), (param,))


def fixed(name: str, target: int) -> Gate:
    return Gate(FixedUnitary(_FIXED[name], name), (target,), (), ())


def cx(control: int, target: int) -> Gate:
    return Gate(FixedUnitary(g.X, "x"), (target,), (control,), ())


def crx(control: int, target: int, param: int, alpha: float = -0.5) -> Gate:
    return Gate(PauliRotation("X", alpha), (target,), (control,), (param,))


def cry(control: int, target: int, param: int, alpha: float = -0.5) -> Gate:
    return Gate(PauliRotation("Y", alpha), (target,), (control,), (param,))


def crz(control: int, target: int, param: int, alpha: float = -0.5) -> Gate:
    return Gate(PauliRotation("Z", alpha), (target,), (control,), (param,))


_FIXED = {"h": g.H, "x": g.X, "y": g.Y, "z": g.Z}


# -- binding and application -------------------------------------------------

def _bound_values(gate: Gate, params) -> list[float]:
    return [float(params[k]) for k in gate.param_refs]


def gate_matrix(gate: Gate, params) -> np.ndarray:
    """The gate's target-space matrix at the given parameter table."""
    kind = gate.kind
    if isinstance(kind, PauliRotation):
        return g.rotation_matrix(kind.axes, float(params[gate.param_refs[0]]), kind.alpha)
    if isinstance(kind, Phase):
        return g.phase_matrix(float(params[gate.param_refs[0]]))
    if isinstance(kind, FixedUnitary):
        return kind.matrix
    m = np.asarray(kind.matrix_fn(*_bound_values(gate, params)), dtype=complex)
    dim = 1 << len(gate.targets)
    if m.shape != (dim, dim):
        raise ValueError(
            f"matrix function returned shape {m.shape} for {len(gate.targets)} targets"
        )
    return m


def _matrix_derivative(gate: Gate, values: list[float], which: int) -> np.ndarray:
    kind = gate.kind
    if kind.derivative_fn is not None:
        return np.asarray(kind.derivative_fn(which, *values), dtype=complex)
    hi = list(values)
    lo = list(values)
    hi[which] += ENTRY_DERIV_STEP
    lo[which] -= ENTRY_DERIV_STEP
    m_hi = np.asarray(kind.matrix_fn(*hi), dtype=complex)
    m_lo = np.asarray(kind.matrix_fn(*lo), dtype=complex)
    return (m_hi - m_lo) / (2 * ENTRY_DERIV_STEP)


def apply_gate(state: StateVector, gate: Gate, params, counters=None) -> None:
    """state <- U(theta) state, honouring controls."""
    apply_matrix(state, gate_matrix(gate, params), gate.targets, gate.controls, counters)


def apply_gate_adjoint(state: StateVector, gate: Gate, params, counters=None) -> None:
    """state <- U(theta)^dagger state (conjugate transpose, same controls)."""
    m = gate_matrix(gate, params)
    apply_matrix(state, m.conj().T, gate.targets, gate.controls, counters)


def apply_gate_inverse(
    state: StateVector, gate: Gate, params, counters=None, gate_index: int | None = None
) -> None:
    """state <- U(theta)^{-1} state; identical to the adjoint for unitary kinds."""
    if isinstance(gate.kind, NonUnitary):
        m = gate_matrix(gate, params)
        try:
            inv = g.invert_small_matrix(m)
        except ValueError as exc:
            where = "" if gate_index is None else f" {gate_index}"
            raise NonInvertibleGateError(f"non-invertible gate{where}: {exc}") from exc
        apply_matrix(state, inv, gate.targets, gate.controls, counters)
    else:
        apply_gate_adjoint(state, gate, params, counters)


# Test hook: scales every deferred derivative scalar. The selftest negative
# control perturbs this to prove the oracle checks can fail.
_DERIV_SCALE = 1.0


@contextlib.contextmanager
def perturbed_derivative_scale(scale: float):
    global _DERIV_SCALE
    old = _DERIV_SCALE
    _DERIV_SCALE = scale
    try:
        yield
    finally:
        _DERIV_SCALE = old


def apply_gate_derivative(
    state: StateVector, gate: Gate, params, which_param: int = 0, counters=None
) -> complex:
    """state <- (dU/d theta_local) state up to the returned deferred scalar.

    The caller must multiply the eventual inner product by the returned
    complex factor. Performs O(1) matrix/projection applications whatever
    the gate kind.
    """
    kind = gate.kind
    if kind.arity == 0:
        raise ValueError(f"{type(kind).__name__} gate has no parameter to differentiate")
    if not 0 <= which_param < kind.arity:
        raise ValueError(f"local parameter {which_param} out of range for arity {kind.arity}")
    if isinstance(kind, PauliRotation):
        for axis, t in zip(kind.axes, gate.targets):
            apply_matrix(state, g.PAULI[axis], (t,))
        theta = float(params[gate.param_refs[0]])
        apply_matrix(state, g.rotation_matrix(kind.axes, theta, kind.alpha), gate.targets)
        scalar = kind.alpha * 1j
    elif isinstance(kind, Phase):
        project_to_one(state, gate.targets)
        theta = float(params[gate.param_refs[0]])
        scalar = 1j * np.exp(1j * theta)
    else:
        values = _bound_values(gate, params)
        apply_matrix(state, _matrix_derivative(gate, values, which_param), gate.targets)
        scalar = 1.0
    if gate.controls:
        project_to_one(state, gate.controls)
    if counters is not None:
        counters.derivative_applies += 1
    return complex(scalar) * _DERIV_SCALE


# -- text format ---------------------------------------------------------------
#
# One gate per line, lowercase, whitespace-separated; `#` starts a comment.
# First non-comment line `qubits <N>`, second `params <num_params>`, then:
#
#   rx q<t> p<k>   ry ...   rz ...      single-qubit rotations
#   rp <axes> q<t1> ... q<tm> p<k>      Pauli-product rotation, axes in {x,y,z}^m
#   phase q<t> p<k>
#   h q<t>   x ...   y ...   z ...      fixed gates
#   cx q<c> q<t>                        controlled-X
#   crx q<c> q<t> p<k>   cry ...  crz ...
#
# Parameter indices may repeat across lines.

_ROTATIONS = {"rx": "X", "ry": "Y", "rz": "Z"}
_CONTROLLED = {"crx": "X", "cry": "Y", "crz": "Z"}


def _parse_index(token: str, prefix: str, line: int, what: str) -> int:
    if not token.startswith(prefix) or not token[len(prefix):].isdigit():
        raise CircuitParseError(line, f"expected {what} token like {prefix}3, got {token!r}")
    return int(token[len(prefix):])


def _parse_header(tokens: list[str], keyword: str, line: int) -> int:
    if len(tokens) != 2 or tokens[0] != keyword or not tokens[1].isdigit():
        raise CircuitParseError(line, f"expected `{keyword} <n>`, got {' '.join(tokens)!r}")
    return int(tokens[1])


def parse_circuit(text: str) -> Circuit:
    num_qubits: int | None = None
    num_params: int | None = None
    gate_list: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if num_qubits is None:
            num_qubits = _parse_header(tokens, "qubits", lineno)
            if num_qubits < 1:
                raise CircuitParseError(lineno, "need at least one qubit")
            continue
        if num_params is None:
            num_params = _parse_header(tokens, "params", lineno)
            continue
        try:
            gate_list.append(_parse_gate_line(tokens, lineno, num_qubits, num_params))
        except CircuitParseError:
            raise
        except ValueError as exc:
            raise CircuitParseError(lineno, str(exc)) from exc
    if num_qubits is None or num_params is None:
        raise CircuitParseError(0, "missing `qubits`/`params` header lines")
    return Circuit(num_qubits, tuple(gate_list), num_params)


def _parse_gate_line(tokens: list[str], line: int, num_qubits: int, num_params: int) -> Gate:
    def qubit(tok: str) -> int:
        q = _parse_index(tok, "q", line, "qubit")
        if q >= num_qubits:
            raise CircuitParseError(line, f"qubit {q} out of range (circuit has {num_qubits})")
        return q

    def param(tok: str) -> int:
        p = _parse_index(tok, "p", line, "parameter")
        if p >= num_params:
            raise CircuitParseError(line, f"parameter {p} out of range (table has {num_params})")
        return p

    def want(n: int) -> None:
        if len(tokens) != n:
            raise CircuitParseError(line, f"`{tokens[0]}` takes {n - 1} argument(s)")

    op = tokens[0]
    if op in _ROTATIONS:
        want(3)
        return Gate(PauliRotation(_ROTATIONS[op]), (qubit(tokens[1]),), (), (param(tokens[2]),))
    if op == "rp":
        if len(tokens) < 4:
            raise CircuitParseError(line, "`rp` takes axes, targets and a parameter")
        axes = tokens[1]
        if any(a not in "xyz" for a in axes):
            raise CircuitParseError(line, f"axes must be over xyz, got {axes!r}")
        if not 1 <= len(axes) <= 2:
            raise CircuitParseError(line, "`rp` supports 1 or 2 targets")
        want(3 + len(axes))
        targets = tuple(qubit(t) for t in tokens[2:-1])
        return Gate(PauliRotation(axes.upper()), targets, (), (param(tokens[-1]),))
    if op == "phase":
        want(3)
        return Gate(Phase(), (qubit(tokens[1]),), (), (param(tokens[2]),))
    if op in _FIXED:
        want(2)
        return Gate(FixedUnitary(_FIXED[op], op), (qubit(tokens[1]),), (), ())
    if op == "cx":
        want(3)
        return Gate(FixedUnitary(g.X, "x"), (qubit(tokens[2]),), (qubit(tokens[1]),), ())
    if op in _CONTROLLED:
        want(4)
        return Gate(
            PauliRotation(_CONTROLLED[op]),
            (qubit(tokens[2]),),
            (qubit(tokens[1]),),
            (param(tokens[3]),),
        )
    raise CircuitParseError(line, f"unknown gate {op!r}")


def circuit_to_text(circuit: Circuit) -> str:
    """Serialize to the text format; raises for gates the format cannot express."""
    lines = [f"qubits {circuit.num_qubits}", f"params {circuit.num_params}"]
    for i, gate in enumerate(circuit.gates):
        lines.append(_gate_line(gate, i))
    return "\n".join(lines) + "\n"


def _gate_line(gate: Gate, index: int) -> str:
    kind = gate.kind
    if isinstance(kind, PauliRotation) and kind.alpha == -0.5:
        p = gate.param_refs[0]
        if len(kind.axes) == 1 and len(gate.controls) == 1:
            return f"cr{kind.axes.lower()} q{gate.controls[0]} q{gate.targets[0]} p{p}"
        if not gate.controls:
            if len(kind.axes) == 1:
                return f"r{kind.axes.lower()} q{gate.targets[0]} p{p}"
            targets = " ".join(f"q{t}" for t in gate.targets)
            return f"rp {kind.axes.lower()} {targets} p{p}"
    if isinstance(kind, Phase) and not gate.controls:
        return f"phase q{gate.targets[0]} p{gate.param_refs[0]}"
    if isinstance(kind, FixedUnitary) and kind.name in _FIXED:
        if not gate.controls:
            return f"{kind.name} q{gate.targets[0]}"
        if kind.name == "x" and len(gate.controls) == 1:
            return f"cx q{gate.controls[0]} q{gate.targets[0]}"
    raise ValueError(f"gate {index} ({type(kind).__name__}) is not representable in circuit text")
