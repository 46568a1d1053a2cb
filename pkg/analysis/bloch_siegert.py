"""
Transient Bloch-Siegert phase shifts on spectator spins.

A pulse of amplitude ω₁ applied at qubit 1's frequency is off-resonant by
δ for a spectator spin, which therefore precesses about a slightly tilted
axis at the faster rate δ√(1+ε²), ε = ω₁/δ. The excess over the bare
detuning precession is the Bloch-Siegert phase. Signs follow δ.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.exceptions import BadIndexError, ZeroAmplitudeError, ZeroDetuningError
from core.linalg import SIGMA_X, SIGMA_Z, expm_unitary
from core.spin_system import SpinChainParams

logger = logging.getLogger(__name__)

BS_COLUMNS = ["spectator", "epsilon", "approx_rad", "exact_rad", "rel_err"]


@dataclass(frozen=True)
class BsReport:
    spectator: int
    epsilon: float
    approx_phase: float
    exact_phase: float
    relative_error: float


def _require_detuning(delta: float):
    if delta == 0:
        raise ZeroDetuningError("Bloch-Siegert shifts are undefined for zero detuning")


def bs_phase_rect(omega1: float, delta: float, tau: float) -> float:
    """Second-order shift ``ω₁² τ / (2δ)`` of a rectangular pulse of width ``tau``."""
    _require_detuning(delta)
    return omega1 ** 2 * tau / (2 * delta)


def bs_phase_pi_pulse(omega1: float, delta: float) -> float:
    """Shift of a pi-pulse (``tau = pi/|ω₁|``): ``|ω₁| π / (2δ)``."""
    _require_detuning(delta)
    if omega1 == 0:
        raise ZeroAmplitudeError("a pi-pulse needs a non-zero amplitude")
    return abs(omega1) * np.pi / (2 * delta)


def bs_sequence_total(omega1: float, delta: float, tau: float, pulses: int = 2) -> float:
    """Accumulated shift of ``pulses`` identical rectangular pulses."""
    return pulses * bs_phase_rect(omega1, delta, tau)


def exact_z_phase_excess(omega1: float, delta: float, tau: float) -> float:
    """
    Exact excess ``(δ√(1+ε²) − δ) τ`` of the tilted-axis precession.

    Written as ``δ τ ε² / (1 + √(1+ε²))`` so small ε keeps full precision.
    """
    _require_detuning(delta)
    eps = omega1 / delta
    return delta * tau * eps ** 2 / (1.0 + np.sqrt(1.0 + eps ** 2))


def nutation_period(omega1: float, delta: float) -> float:
    return 2 * np.pi / np.hypot(delta, omega1)


def simulated_z_phase_excess(omega1: float, delta: float, tau: float) -> float:
    """
    Excess phase read off the simulated two-level propagator.

    Uses the phase of ``<0|U|0>`` for ``U = exp(-i(δ Iz + ω₁ Ix) τ)`` relative
    to the bare ``-δτ/2``. Exact at whole nutation periods; in between, the
    transverse excursion adds an oscillation of order ε². The excess must
    be smaller than 2π in magnitude.
    """
    _require_detuning(delta)
    u = expm_unitary(delta * SIGMA_Z / 2 + omega1 * SIGMA_X / 2, tau)
    relative = np.angle(u[0, 0] * np.exp(1j * delta * tau / 2))
    return float(-2.0 * relative)


def bs_report(p: SpinChainParams, omega1: float, tau: float, spectator: int) -> BsReport:
    """
    Approximate and exact shift on one spectator spin.

    Args:
        p: Chain parameters (detunings are taken from here).
        omega1: Pulse amplitude (rad/s).
        tau: Pulse width (s).
        spectator: 2 or 3.

    Returns:
        A :class:`BsReport`; an all-zero report when ``omega1`` is zero.
    """
    if spectator not in (2, 3):
        raise BadIndexError(f"spectator must be qubit 2 or 3, got {spectator}")
    delta = p.delta12 if spectator == 2 else p.delta13
    _require_detuning(delta)
    approx = bs_phase_rect(omega1, delta, tau)
    exact = exact_z_phase_excess(omega1, delta, tau)
    relative_error = abs(approx - exact) / abs(exact) if exact != 0 else 0.0
    return BsReport(
        spectator=spectator,
        epsilon=omega1 / delta,
        approx_phase=approx,
        exact_phase=exact,
        relative_error=relative_error,
    )


def bs_table(p: SpinChainParams, omega1: float, tau: float, pulses: int = 1) -> pd.DataFrame:
    """Both spectators, phases summed over ``pulses`` identical pulses."""
    rows = []
    for spectator in (2, 3):
        report = bs_report(p, omega1, tau, spectator)
        rows.append({
            "spectator": spectator,
            "epsilon": report.epsilon,
            "approx_rad": pulses * report.approx_phase,
            "exact_rad": pulses * report.exact_phase,
            "rel_err": report.relative_error,
        })
    logger.debug("BS table for omega1=%.6g rad/s tau=%.6g s: %s", omega1, tau, rows)
    return pd.DataFrame(rows, columns=BS_COLUMNS)
