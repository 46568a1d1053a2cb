"""
Rectangular pulse schedules and their exact propagators.

A :class:`PulseSequence` lists segments in time order: the first segment
acts first, so its propagator ends up rightmost in the product.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .exceptions import BadTimingError, InvalidParametersError
from .linalg import ComplexMatrix, expm_unitary, identity
from .spin_system import (
    TWO_PI,
    SpinChainParams,
    full_hamiltonian,
    spin_op,
    zz_coupling,
)

logger = logging.getLogger(__name__)


class Model(str, Enum):
    """Which Hamiltonian a segment evolves under."""

    REDUCED = "reduced"
    FULL = "full"


@dataclass(frozen=True)
class PulseSegment:
    """
    One constant-amplitude piece of a schedule.

    ``amplitude`` is the rf strength in rad/s (0 for free evolution).
    ``angle`` is only set on the instantaneous pulses built by
    :func:`hard_limit_propagator`; such segments have zero duration and
    rotate qubit-1's rf operator by ``angle``.
    """

    duration: float
    amplitude: float = 0.0
    phase: float = 0.0
    model: Model = Model.REDUCED
    angle: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.duration < 0:
            raise BadTimingError(f"segment duration must be non-negative, got {self.duration}")
        if self.angle is not None and self.duration != 0:
            raise BadTimingError("instantaneous segments must have zero duration")


@dataclass(frozen=True)
class PulseSequence:
    segments: Tuple[PulseSegment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        models = {segment.model for segment in self.segments}
        if len(models) > 1:
            raise InvalidParametersError("all segments of a sequence must share one model")

    @property
    def model(self) -> Optional[Model]:
        return self.segments[0].model if self.segments else None

    def then(self, other: "PulseSequence") -> "PulseSequence":
        """Concatenate: ``other`` runs after ``self``."""
        return PulseSequence(self.segments + other.segments)

    def __len__(self) -> int:
        return len(self.segments)


def total_duration(seq: PulseSequence) -> float:
    return float(sum(segment.duration for segment in seq.segments))


def _rf_operator(model: Model, phase: float) -> ComplexMatrix:
    qubits = (1,) if model is Model.REDUCED else (1, 2, 3)
    return sum(np.cos(phase) * spin_op("x", k) + np.sin(phase) * spin_op("y", k) for k in qubits)


def segment_hamiltonian(segment: PulseSegment, p: SpinChainParams) -> ComplexMatrix:
    if segment.model is Model.FULL:
        return full_hamiltonian(p, segment.amplitude, segment.phase)
    return (
        segment.amplitude * _rf_operator(Model.REDUCED, segment.phase)
        + p.j12 * zz_coupling(1, 2)
        + p.j23 * zz_coupling(2, 3)
    )


def segment_propagator(segment: PulseSegment, p: SpinChainParams) -> ComplexMatrix:
    if segment.angle is not None:
        return expm_unitary(_rf_operator(segment.model, segment.phase), segment.angle)
    if segment.duration == 0:
        return identity(8)
    return expm_unitary(segment_hamiltonian(segment, p), segment.duration)


def propagate(seq: PulseSequence, p: SpinChainParams) -> ComplexMatrix:
    """
    Time-ordered propagator of a schedule.

    Args:
        seq: Segments in time order.
        p: Chain parameters.

    Returns:
        ``U_n ... U_2 U_1`` (later segments multiply on the left).
    """
    cache: Dict[PulseSegment, ComplexMatrix] = {}
    total = identity(8)
    for segment in seq.segments:
        if segment not in cache:
            cache[segment] = segment_propagator(segment, p)
        total = cache[segment] @ total
    return total


def free_evolution(duration: float, model: Model = Model.REDUCED) -> PulseSegment:
    return PulseSegment(duration=duration, amplitude=0.0, phase=0.0, model=model)


def refocusing_sequence(t_star: float, tau: float, omega1: float,
                        model: Model = Model.REDUCED, phase: float = 0.0) -> PulseSequence:
    """
    Free evolution and a pulse on qubit 1, twice, filling a total time ``t_star``.

    Args:
        t_star: Total gate time (s).
        tau: Width of each pulse (s), at most ``t_star / 2``.
        omega1: Pulse amplitude (rad/s).
        model: Hamiltonian used for every segment.
        phase: Rf phase of both pulses.

    Raises:
        BadTimingError: If the pulses do not fit.
    """
    half = t_star / 2
    if tau < 0 or tau > half * (1 + 1e-12):
        raise BadTimingError(f"pulse width {tau} s does not fit in half of t*={t_star} s")
    gap = max(half - tau, 0.0)
    model = Model(model)
    free = free_evolution(gap, model)
    pulse = PulseSegment(duration=tau, amplitude=omega1, phase=phase, model=model)
    return PulseSequence((free, pulse, free, pulse))


def soft_pulse_sequence(alpha: float, p: SpinChainParams,
                        model: Model = Model.REDUCED) -> PulseSequence:
    """Single weak pulse of length ``alpha/J23`` with the cancelling amplitude ω₊."""
    # Solver lives with the rest of the gate-design code.
    from analysis.gate_design import min_valid_n, soft_amplitude

    if not alpha > 0:
        raise InvalidParametersError(f"alpha must be positive, got {alpha}")
    solution = soft_amplitude(alpha, p.j12, p.j23, min_valid_n(alpha, p.j12, p.j23))
    logger.debug("soft pulse n=%d omega+=%.6g rad/s tau=%.6g s",
                 solution.n, solution.omega_plus, solution.tau)
    return PulseSequence((PulseSegment(duration=solution.tau, amplitude=solution.omega_plus,
                                       phase=0.0, model=Model(model)),))


def hard_limit_propagator(t_star: float, p: SpinChainParams) -> ComplexMatrix:
    """
    Refocusing with instantaneous pi-pulses on qubit 1 under the reduced model.

    Equals ``-target_entangler(J23 * t_star)`` exactly.
    """
    if not t_star > 0:
        raise BadTimingError(f"t* must be positive, got {t_star}")
    free = free_evolution(t_star / 2)
    flip = PulseSegment(duration=0.0, angle=np.pi)
    return propagate(PulseSequence((free, flip, free, flip)), p)


def sequence_records(seq: PulseSequence) -> List[dict]:
    """Dump format: one record per segment, amplitudes in Hz."""
    records = []
    for segment in seq.segments:
        if segment.angle is not None:
            raise InvalidParametersError("instantaneous segments have no record form")
        records.append({
            "duration_s": segment.duration,
            "amplitude_hz": segment.amplitude / TWO_PI,
            "phase_rad": segment.phase,
            "model": segment.model.value,
        })
    return records


def sequence_from_records(rows: Iterable[dict]) -> PulseSequence:
    return PulseSequence(tuple(
        PulseSegment(
            duration=float(row["duration_s"]),
            amplitude=TWO_PI * float(row["amplitude_hz"]),
            phase=float(row.get("phase_rad", 0.0)),
            model=Model(row.get("model", Model.REDUCED.value)),
        )
        for row in rows
    ))

