"""Gate matrices and helpers for 2x2 and 4x4 complex matrices."""
from __future__ import annotations

import warnings
from collections.abc import Sequence

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

PIVOT_EPS = 1e-14

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

# |1><0| and |0><1|, for raising/lowering observable factors
RAISE = np.array([[0, 0], [1, 0]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def kron_le(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product where factors[k] acts on bit k of the joint index.

    Little-endian to match the amplitude indexing: the first factor sits on
    the least significant bit, so the list order matches a gate target list.
    """
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(f, out)
    return out


def pauli_product(axes: str) -> np.ndarray:
    """Tensor product of Paulis, axes[k] on joint-index bit k."""
    return kron_le([PAULI[a] for a in axes])


def rotation_matrix(axes: str, theta: float, alpha: float = -0.5) -> np.ndarray:
    """exp(alpha * i * theta * P) for a Pauli product P.

    P squares to the identity, so the exponential closes to
    cos(alpha*theta) I + i sin(alpha*theta) P.
    """
    p = pauli_product(axes)
    dim = p.shape[0]
    return np.cos(alpha * theta) * np.eye(dim) + 1j * np.sin(alpha * theta) * p


def phase_matrix(theta: float) -> np.ndarray:
    """diag(1, e^{i theta})."""
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


def invert_small_matrix(m: np.ndarray) -> np.ndarray:
    """Invert a 2x2 (analytically) or 4x4 (pivoted elimination) complex matrix.

    Raises ValueError when the determinant (2x2) or any pivot (4x4) falls
    below PIVOT_EPS in magnitude.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape == (2, 2):
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) <= PIVOT_EPS:
            raise ValueError(f"singular 2x2 matrix (|det| = {abs(det):.3e})")
        return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det
    if m.shape == (4, 4):
        with warnings.catch_warnings():
            # singularity is detected below via the pivots
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(m, check_finite=False)
        pivots = np.abs(np.diag(lu))
        if pivots.min() <= PIVOT_EPS:
            raise ValueError(f"singular 4x4 matrix (min pivot = {pivots.min():.3e})")
        return lu_solve((lu, piv), np.eye(4, dtype=complex), check_finite=False)
    raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
