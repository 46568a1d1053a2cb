"""
Hamiltonians and target operators of a three-spin linear chain.

All frequencies are angular (rad/s). Conversion from the cyclic values
quoted for molecules (Hz) happens in :meth:`SpinChainParams.from_hz`.
J13 is zero by assumption.
"""

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .exceptions import BadIndexError, BadTimingError, InvalidParametersError, ZeroAlphaError
from .linalg import I2, PAULI, ComplexMatrix, as_matrix, identity, kron

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
N_QUBITS = 3


@dataclass(frozen=True)
class SpinChainParams:
    """Couplings and carrier detunings of the chain, in rad/s."""

    j12: float
    j23: float
    delta12: float
    delta13: float
    label: str = ""

    def __post_init__(self):
        if not self.j23 > 0:
            raise InvalidParametersError(f"j23 must be positive, got {self.j23}")
        if self.j12 < 0:
            raise InvalidParametersError(f"j12 must be non-negative, got {self.j12}")

    @classmethod
    def from_hz(cls, j12_hz: float, j23_hz: float, delta12_hz: float, delta13_hz: float,
                label: str = "") -> "SpinChainParams":
        return cls(
            j12=TWO_PI * j12_hz,
            j23=TWO_PI * j23_hz,
            delta12=TWO_PI * delta12_hz,
            delta13=TWO_PI * delta13_hz,
            label=label,
        )

    def to_hz(self) -> dict:
        return {
            "label": self.label,
            "j12_hz": self.j12 / TWO_PI,
            "j23_hz": self.j23 / TWO_PI,
            "delta12_hz": self.delta12 / TWO_PI,
            "delta13_hz": self.delta13 / TWO_PI,
        }

    def mirrored(self) -> "SpinChainParams":
        """
        The same molecule seen with qubit 3 as the rf carrier.

        Qubit order is reversed, so the old J23 becomes the "spectator"
        coupling j12 and the old J12 becomes the gate coupling j23. Detunings
        are re-referenced to qubit 3's Larmor frequency.
        """
        return SpinChainParams(
            j12=self.j23,
            j23=self.j12,
            delta12=self.delta12 - self.delta13,
            delta13=-self.delta13,
            label=f"{self.label} (mirrored)" if self.label else "mirrored",
        )


def spin_op(axis: str, k: int, n: int = N_QUBITS) -> ComplexMatrix:
    """
    Single-spin operator ``σ_axis / 2`` placed in slot ``k`` of an n-qubit register.

    Args:
        axis: One of ``"x"``, ``"y"``, ``"z"``.
        k: Qubit index, 1-based, qubit 1 most significant.
        n: Register size.

    Returns:
        The ``2**n`` square operator.
    """
    if axis not in PAULI:
        raise BadIndexError(f"unknown spin axis {axis!r}")
    if not 1 <= k <= n:
        raise BadIndexError(f"qubit index {k} outside 1..{n}")
    factors = [PAULI[axis] / 2 if slot == k else I2 for slot in range(1, n + 1)]
    return reduce(kron, factors)


def zz_coupling(i: int, j: int, n: int = N_QUBITS) -> ComplexMatrix:
    return spin_op("z", i, n) @ spin_op("z", j, n)


def reduced_hamiltonian(p: SpinChainParams, omega1: float) -> ComplexMatrix:
    """Rf on qubit 1 only, no detunings: ω₁·Ix⁽¹⁾ + J₁₂·Iz⁽¹⁾Iz⁽²⁾ + J₂₃·Iz⁽²⁾Iz⁽³⁾."""
    return omega1 * spin_op("x", 1) + p.j12 * zz_coupling(1, 2) + p.j23 * zz_coupling(2, 3)


def detuning_term(p: SpinChainParams) -> ComplexMatrix:
    return p.delta12 * spin_op("z", 2) + p.delta13 * spin_op("z", 3)


def full_hamiltonian(p: SpinChainParams, omega1: float, phase: float = 0.0) -> ComplexMatrix:
    """
    Common-frame Hamiltonian with the rf field acting on all three spins.

    Args:
        p: Chain parameters.
        omega1: Rf amplitude (rad/s).
        phase: Rf phase; 0 drives along x, pi/2 along y.

    Returns:
        The 8x8 Hermitian, traceless Hamiltonian.
    """
    rf = np.cos(phase) * sum(spin_op("x", k) for k in range(1, 4))
    rf = rf + np.sin(phase) * sum(spin_op("y", k) for k in range(1, 4))
    return (
        omega1 * rf
        + detuning_term(p)
        + p.j12 * zz_coupling(1, 2)
        + p.j23 * zz_coupling(2, 3)
    )


def _diagonal_exp(generator: ComplexMatrix, angle: float) -> ComplexMatrix:
    # Only valid for diagonal generators.
    return np.diag(np.exp(-1j * angle * np.diag(generator)))


def target_entangler(alpha: float) -> ComplexMatrix:
    """``exp(-i α Iz⁽²⁾Iz⁽³⁾)``, the selective entangling operator on qubits 2 and 3."""
    if alpha == 0:
        raise ZeroAlphaError("the entangling angle must be non-zero")
    return _diagonal_exp(zz_coupling(2, 3), alpha)


def target_common_frame(p: SpinChainParams) -> ComplexMatrix:
    """
    The α = π entangler as seen in qubit 1's rotating frame.

    The detuning phases accumulated over the gate time ``π/J23`` are part
    of the target.
    """
    t_gate = np.pi / p.j23
    return (
        _diagonal_exp(zz_coupling(2, 3), np.pi)
        @ _diagonal_exp(spin_op("z", 2), p.delta12 * t_gate)
        @ _diagonal_exp(spin_op("z", 3), p.delta13 * t_gate)
    )


def to_individual_frame(u: ComplexMatrix, p: SpinChainParams, t: float) -> ComplexMatrix:
    """Remove the detuning precession accumulated over ``t`` from a common-frame operator."""
    if t < 0:
        raise BadTimingError(f"frame time must be non-negative, got {t}")
    frame = np.diag(np.exp(1j * t * np.diag(detuning_term(p))))
    return frame @ as_matrix(u)


def reverse_qubits(u: ComplexMatrix) -> ComplexMatrix:
    """Conjugate by the permutation taking qubit order (1, 2, 3) to (3, 2, 1)."""
    m = as_matrix(u)
    order = [int(f"{i:03b}"[::-1], 2) for i in range(8)]
    perm = identity(8)[order]
    return perm @ m @ perm.T
