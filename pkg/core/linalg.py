"""
Dense complex linear algebra for small spin registers.

Matrices are plain complex128 ``numpy`` arrays. Qubit 1 is always the
most-significant tensor factor: basis index ``i = 4*b1 + 2*b2 + b3`` for a
three-qubit register, i.e. the left-to-right order of the ``⊗`` products.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import BadDimensionError, InvalidStateError, NotHermitianError

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray
StateVector = np.ndarray

HERMITIAN_TOL = 1e-10
STATE_NORM_TOL = 1e-12

I2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


@dataclass(frozen=True)
class PhaseCheck:
    """Outcome of :func:`identity_up_to_phase`."""

    is_phase_identity: bool
    phi: float
    lattice_phi: Optional[float] = None


def as_matrix(a) -> ComplexMatrix:
    """Coerce to a square complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise BadDimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Tensor product with ``a`` as the more significant factor."""
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return as_matrix(a).conj().T


def max_norm(a: ComplexMatrix) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def is_hermitian(h: ComplexMatrix, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(h)
    return max_norm(m - m.conj().T) < tol


def is_unitary(u: ComplexMatrix, tol: float = 1e-9) -> bool:
    m = as_matrix(u)
    return max_norm(m.conj().T @ m - identity(m.shape[0])) < tol


def hermitian_eig(h: ComplexMatrix) -> Tuple[np.ndarray, ComplexMatrix]:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        h: Hermitian matrix (checked to ``HERMITIAN_TOL`` in the max norm).

    Returns:
        Tuple of (ascending real eigenvalues, unitary matrix whose columns
        are the matching eigenvectors).

    Raises:
        NotHermitianError: If ``h`` is not Hermitian.
    """
    m = as_matrix(h)
    asymmetry = max_norm(m - m.conj().T)
    if not asymmetry < HERMITIAN_TOL:
        raise NotHermitianError(f"matrix deviates from its adjoint by {asymmetry:.3e}")
    # Symmetrize so LAPACK sees the exact Hermitian part.
    eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    return eigenvalues, eigenvectors


def expm_unitary(h: ComplexMatrix, t: float) -> ComplexMatrix:
    """
    Propagator ``exp(-i h t)`` of a constant Hermitian generator.

    Args:
        h: Hermitian generator in rad/s.
        t: Duration in seconds.

    Returns:
        The unitary ``W diag(exp(-i λ t)) W†``.
    """
    eigenvalues, w = hermitian_eig(h)
    if t == 0:
        return identity(w.shape[0])
    return (w * np.exp(-1j * eigenvalues * t)) @ w.conj().T


def partial_trace_keep_middle(rho: ComplexMatrix) -> ComplexMatrix:
    """Trace out qubits 1 and 3 of a three-qubit operator."""
    m = as_matrix(rho)
    if m.shape != (8, 8):
        raise BadDimensionError(f"partial trace expects an 8x8 operator, got {m.shape}")
    # Row index (i, a, k), column index (j, b, l).
    return np.einsum("iakibk->ab", m.reshape(2, 2, 2, 2, 2, 2))


def identity_up_to_phase(u: ComplexMatrix, tol: float = 1e-9) -> PhaseCheck:
    """
    Test whether ``u`` equals ``exp(i phi) * I`` for some phase.

    The phase is read from ``u[0, 0]`` and lies in (-pi, pi]. For 8x8
    operators a positive result also reports the nearest point of the
    ``pi k / 4`` lattice, folded into [0, 2 pi).
    """
    m = as_matrix(u)
    phi = float(np.angle(m[0, 0]))
    if np.isclose(phi, -np.pi):
        phi = float(np.pi)
    ok = max_norm(m - np.exp(1j * phi) * identity(m.shape[0])) < tol
    lattice_phi = None
    if ok and m.shape[0] == 8:
        k = int(np.round(phi / (np.pi / 4))) % 8
        lattice_phi = k * np.pi / 4
    return PhaseCheck(is_phase_identity=bool(ok), phi=phi, lattice_phi=lattice_phi)


def as_state_vector(psi) -> StateVector:
    """Validate a normalized ket."""
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if v.size < 1 or not np.all(np.isfinite(v)):
        raise InvalidStateError("state vector must be non-empty and finite")
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise InvalidStateError(f"state vector has squared norm {norm:.15f}")
    return v


def projector(psi) -> ComplexMatrix:
    v = as_state_vector(psi)
    return np.outer(v, v.conj())


def global_phase_fit(target: ComplexMatrix, actual: ComplexMatrix) -> Tuple[float, float]:
    """
    Best single global phase aligning ``actual`` to ``target``.

    Returns:
        Tuple of (phase theta, max-norm residual of ``actual - exp(i theta) target``).
    """
    overlap = np.trace(dagger(target) @ as_matrix(actual))
    theta = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    residual = max_norm(actual - np.exp(1j * theta) * target)
    return theta, residual
