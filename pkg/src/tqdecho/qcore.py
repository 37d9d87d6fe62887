"""Small dense spin-system linear algebra: Pauli matrices, exact Hermitian
matrix exponentials, tensor products, and gate/state metrics.

Everything works on plain complex numpy arrays. hbar = 1 throughout; all
energies are angular frequencies.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "ID2",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULI",
    "ket",
    "basis_state",
    "pauli_dot",
    "tensor_product",
    "expm_hermitian",
    "gate_distance",
    "bloch_vector",
    "density_from_bloch",
    "wrap_angle",
    "is_hermitian",
    "is_unitary",
    "check_state",
]

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

_ALLOWED_DIMS = (2, 4)


def ket(*amplitudes) -> np.ndarray:
    """Column state from amplitudes, normalized."""
    v = np.asarray(amplitudes, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector cannot be normalized")
    return v / n

def basis_state(index: int, dim: int = 2) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def pauli_dot(vec) -> np.ndarray:
    """vec . sigma for a real 3-vector (Hermitian 2x2)."""
    v = np.asarray(vec, dtype=float)
    return v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; first argument is the first tensor factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m: np.ndarray, tol: float = 1e-9) -> bool:
    d = m.shape[0]
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(d))) <= tol)


def check_state(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate a state vector: dim 2 or 4, unit norm within tol."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.shape[0] not in _ALLOWED_DIMS:
        raise ValueError(f"state must be a vector of dimension 2 or 4, got shape {psi.shape}")
    n = np.linalg.norm(psi)
    if abs(n - 1.0) > tol:
        raise ValueError(f"state norm {n} deviates from 1 by more than {tol}")
    return psi


def expm_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(-i*h*t) for Hermitian h via eigendecomposition.

    The eigendecomposition route keeps the result unitary to machine
    precision for the small dense matrices used here (dimensions 2 and 4).

    Raises ValueError if h is not Hermitian within 1e-12 or has an
    unsupported dimension.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] not in _ALLOWED_DIMS:
        raise ValueError(f"expected a square matrix of dimension 2 or 4, got shape {h.shape}")
    defect = np.max(np.abs(h - h.conj().T))
    if defect > 1e-12:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {defect:.3e}")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def gate_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Global-phase-invariant gate distance 1 - |Tr(U^dag V)| / d.

    Zero iff U and V agree up to a global phase; insensitive to the overall
    sign ambiguity of half-turn pulse products.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"incompatible gate shapes {u.shape} vs {v.shape}")
    d = u.shape[0]
    # |trace| can exceed d by rounding for near-identical unitaries
    return max(0.0, float(1.0 - abs(np.trace(u.conj().T @ v)) / d))


def bloch_vector(psi: np.ndarray) -> np.ndarray:
    """Bloch vector (<sx>, <sy>, <sz>) of a single-qubit pure state."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise ValueError("bloch_vector takes a single-qubit state")
    a, b = psi
    return np.array([
        2 * (a.conjugate() * b).real,
        2 * (a.conjugate() * b).imag,
        abs(a) ** 2 - abs(b) ** 2,
    ])


def density_from_bloch(r) -> np.ndarray:
    """Density matrix (1 + r . sigma) / 2 for |r| <= 1."""
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) > 1.0 + 1e-12:
        raise ValueError("Bloch vector must have norm <= 1")
    return 0.5 * (ID2 + pauli_dot(r))


def wrap_angle(x: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    return float(np.pi - (np.pi - x) % (2.0 * np.pi))
