"""
Fully correlated Pauli noise and its three-qubit noiseless-subsystem code.

Qubit 2 carries the data; qubits 1 and 3 are ancillae in arbitrary (possibly
mixed) states. The encode/decode operators use two entangling gates each,
either ideal ``exp(-iπ IzIz)`` factors or full-model soft-pulse simulations.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import BadChannelError, BadDimensionError, InvalidParametersError, InvalidStateError
from core.linalg import (
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ComplexMatrix,
    as_state_vector,
    dagger,
    expm_unitary,
    global_phase_fit,
    is_hermitian,
    kron,
    partial_trace_keep_middle,
    projector,
)
from core.pulses import Model, propagate, soft_pulse_sequence
from core.spin_system import (
    SpinChainParams,
    reverse_qubits,
    spin_op,
    to_individual_frame,
    zz_coupling,
)

from .gate_design import verify_cancellation

logger = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-12
DEFAULT_SEED = 20130501
DENSITY_TRACE_TOL = 1e-10
QUARTER_TURN = np.pi / 2


@dataclass(frozen=True)
class CorrelatedChannel:
    """Probabilities of the four threefold Pauli errors I, X, Y, Z."""

    p: Tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        probabilities = tuple(float(x) for x in self.p)
        object.__setattr__(self, "p", probabilities)
        validate_probabilities(probabilities)

    @classmethod
    def uniform(cls) -> "CorrelatedChannel":
        return cls((0.25, 0.25, 0.25, 0.25))


@dataclass(frozen=True)
class IdentityCheck:
    index: int
    holds: bool
    phase: float
    residual: float


@dataclass(frozen=True)
class RecoveryStats:
    min: float
    mean: float
    trials: int
    fidelities: Tuple[float, ...] = field(default=(), repr=False)


def validate_probabilities(p: Sequence[float]):
    if len(p) != 4:
        raise BadChannelError(f"expected four probabilities, got {len(p)}")
    if any(x < 0 or not np.isfinite(x) for x in p):
        raise BadChannelError(f"probabilities must be finite and non-negative: {p}")
    if abs(sum(p) - 1.0) > PROBABILITY_TOL:
        raise BadChannelError(f"probabilities sum to {sum(p):.15f}, not 1")


def kraus_set() -> List[ComplexMatrix]:
    """E₀..E₃: the threefold tensor powers of I, σx, σy, σz."""
    return [reduce(kron, [sigma] * 3) for sigma in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z)]


def apply_channel(rho: ComplexMatrix, ch: CorrelatedChannel) -> ComplexMatrix:
    """Kraus sum ``Σ p_i E_i ρ E_i†``."""
    validate_probabilities(ch.p)
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (8, 8):
        raise BadDimensionError(f"the channel acts on 8x8 density matrices, got {rho.shape}")
    out = np.zeros_like(rho)
    for weight, e in zip(ch.p, kraus_set()):
        if weight:
            out += weight * (e @ rho @ e.conj().T)
    return out


def rotation(axis: str, k: int, angle: float) -> ComplexMatrix:
    """``exp(-i angle I_axis)`` on qubit ``k``."""
    return expm_unitary(spin_op(axis, k), angle)


def ideal_gate(i: int, j: int) -> ComplexMatrix:
    return np.diag(np.exp(-1j * np.pi * np.diag(zz_coupling(i, j))))


def compose_encode(u12: ComplexMatrix, u23: ComplexMatrix, quarter: float = QUARTER_TURN) -> ComplexMatrix:
    """R₂y(q) · U₂₃ · R₂x(−q) · R₁y(−q) · U₁₂ (rightmost acts first)."""
    return (
        rotation("y", 2, quarter)
        @ u23
        @ rotation("x", 2, -quarter)
        @ rotation("y", 1, -quarter)
        @ u12
    )


def compose_decode(u12: ComplexMatrix, u23: ComplexMatrix, quarter: float = QUARTER_TURN) -> ComplexMatrix:
    """U₁₂ · R₁y(q) · R₂x(−q) · U₂₃ · R₂y(−q)."""
    return (
        u12
        @ rotation("y", 1, quarter)
        @ rotation("x", 2, -quarter)
        @ u23
        @ rotation("y", 2, -quarter)
    )


@lru_cache(maxsize=32)
def _soft_gate_23(p: SpinChainParams) -> ComplexMatrix:
    seq = soft_pulse_sequence(np.pi, p, Model.FULL)
    check = verify_cancellation(seq.segments[0].amplitude, np.pi, p)
    if not check.ok:
        logger.warning("soft-pulse amplitude for %s fails the cancellation check", p.label)
    return to_individual_frame(propagate(seq, p), p, np.pi / p.j23)


def soft_gate_23(p: SpinChainParams) -> ComplexMatrix:
    """Full-model soft-pulse U₂₃(π) (rf on qubit 1), individual frame."""
    return _soft_gate_23(p).copy()


def soft_gate_12(p: SpinChainParams) -> ComplexMatrix:
    """Full-model soft-pulse U₁₂(π) with the rf on qubit 3, individual frame."""
    return reverse_qubits(_soft_gate_23(p.mirrored()))


def _gates(ideal: bool, p: Optional[SpinChainParams]) -> Tuple[ComplexMatrix, ComplexMatrix]:
    if ideal:
        return ideal_gate(1, 2), ideal_gate(2, 3)
    if p is None:
        raise InvalidParametersError("soft-pulse gates need chain parameters")
    return soft_gate_12(p), soft_gate_23(p)


def encode_operator(ideal: bool = True, p: Optional[SpinChainParams] = None) -> ComplexMatrix:
    return compose_encode(*_gates(ideal, p))


def decode_operator(ideal: bool = True, p: Optional[SpinChainParams] = None) -> ComplexMatrix:
    return compose_decode(*_gates(ideal, p))


def retrieval_targets() -> List[ComplexMatrix]:
    """
    What decode · E_i · encode reduces to for each error.

    Each acts trivially on qubit 2.
    """
    return [
        -4 * spin_op("z", 1) @ spin_op("z", 3),
        2j * spin_op("x", 3),
        -4 * spin_op("y", 1) @ spin_op("x", 3),
        -4j * spin_op("x", 1) @ spin_op("z", 3),
    ]


def operator_identity_check(tol: float = 1e-9, ideal: bool = True,
                            p: Optional[SpinChainParams] = None) -> List[IdentityCheck]:
    """Compare ``U_R E_i U_E`` with each retrieval target up to one fitted global phase."""
    encode, decode = encode_operator(ideal, p), decode_operator(ideal, p)
    checks = []
    for index, (e, target) in enumerate(zip(kraus_set(), retrieval_targets())):
        phase, residual = global_phase_fit(target, decode @ e @ encode)
        checks.append(IdentityCheck(index=index, holds=residual < tol, phase=phase, residual=residual))
    return checks


def _as_density(state) -> ComplexMatrix:
    m = np.asarray(state, dtype=np.complex128)
    if m.ndim == 1:
        return projector(m)
    if m.shape != (2, 2):
        raise BadDimensionError(f"ancilla state must be a 2-vector or 2x2 matrix, got {m.shape}")
    if not np.all(np.isfinite(m)) or not is_hermitian(m):
        raise InvalidStateError("ancilla density matrix must be finite and Hermitian")
    trace = complex(np.trace(m))
    if abs(trace - 1.0) > DENSITY_TRACE_TOL:
        raise InvalidStateError(f"ancilla density matrix has trace {trace.real:.15f}")
    if np.linalg.eigvalsh(m)[0] < -DENSITY_TRACE_TOL:
        raise InvalidStateError("ancilla density matrix is not positive semidefinite")
    return m


def _recovery(encode: ComplexMatrix, decode: ComplexMatrix, rho_u: ComplexMatrix,
              rho_v: ComplexMatrix, psi: np.ndarray, ch: CorrelatedChannel) -> float:
    rho = kron(kron(rho_u, projector(psi)), rho_v)
    noisy = apply_channel(encode @ rho @ dagger(encode), ch)
    data = partial_trace_keep_middle(decode @ noisy @ dagger(decode))
    return float(np.real(np.vdot(psi, data @ psi)))


def recovery_check_mixed(rho_u, rho_v, psi, ch: CorrelatedChannel, ideal: bool = True,
                         p: Optional[SpinChainParams] = None) -> float:
    """
    Data-qubit fidelity after encode, noise and decode with ancillae given as density matrices.

    Args:
        rho_u: Qubit-1 ancilla (2x2 density matrix or ket).
        rho_v: Qubit-3 ancilla (2x2 density matrix or ket).
        psi: Data ket on qubit 2.
        ch: Noise channel.
        ideal: Ideal gates, or full-model soft pulses when False.
        p: Chain parameters, required when ``ideal`` is False.

    Returns:
        ``<ψ| Tr₁,₃(U_R ℰ(U_E ρ U_E†) U_R†) |ψ>``.
    """
    validate_probabilities(ch.p)
    psi = as_state_vector(psi)
    return _recovery(encode_operator(ideal, p), decode_operator(ideal, p),
                     _as_density(rho_u), _as_density(rho_v), psi, ch)


def recovery_check(u, v, psi, ch: CorrelatedChannel, ideal: bool = True,
                   p: Optional[SpinChainParams] = None) -> float:
    """Pure-ancilla form of :func:`recovery_check_mixed`."""
    return recovery_check_mixed(as_state_vector(u), as_state_vector(v), psi, ch, ideal, p)


def random_bloch_state(rng: np.random.Generator) -> np.ndarray:
    """Uniform draw on the Bloch sphere: cos θ ~ U(−1, 1), φ ~ U(0, 2π)."""
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2 * np.pi)
    theta = np.arccos(z)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=np.complex128)


def random_channel(rng: np.random.Generator) -> CorrelatedChannel:
    p = rng.dirichlet(np.ones(4))
    # Absorb the rounding residue so the sum is 1 to machine precision.
    p[0] = 1.0 - float(np.sum(p[1:]))
    return CorrelatedChannel(tuple(np.clip(p, 0.0, 1.0)))


def soft_pulse_recovery_fidelity(p: SpinChainParams, ch: CorrelatedChannel, trials: int,
                                 seed: int = DEFAULT_SEED, ideal: bool = False) -> RecoveryStats:
    """
    Recovery fidelity over seeded random ancilla and data states.

    Trial ``k`` draws from ``default_rng([seed, k])``, so each trial is
    reproducible on its own and the statistics do not depend on order.
    """
    if trials < 1:
        raise InvalidParametersError(f"trials must be at least 1, got {trials}")
    validate_probabilities(ch.p)
    encode, decode = encode_operator(ideal, p), decode_operator(ideal, p)
    fidelities = []
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        u, psi, v = (random_bloch_state(rng) for _ in range(3))
        fidelities.append(_recovery(encode, decode, projector(u), projector(v), psi, ch))
    logger.info("recovery over %d trials: min %.6g mean %.6g", trials, min(fidelities), np.mean(fidelities))
    return RecoveryStats(
        min=float(min(fidelities)),
        mean=float(np.mean(fidelities)),
        trials=trials,
        fidelities=tuple(fidelities),
    )


def identity_records(checks: List[IdentityCheck]) -> List[dict]:
    return [
        {"index": c.index, "holds": c.holds, "phase_rad": c.phase, "residual": c.residual}
        for c in checks
    ]
