"""
Soft-pulse design and propagator-fidelity optimization.

The soft pulse drives qubit 1 for ``τ = α/J23`` with an amplitude chosen so
that the rf term and the unwanted J12 coupling exponentiate to a global
phase. The refocusing alternative is scored on the normalized grid
``τ̃ = 2 J23 τ / π``, ``ω̃₁ = ω₁ τ / π`` against the common-frame target.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.ndimage import maximum_filter
from scipy.optimize import minimize

from core.exceptions import BadTimingError, InvalidParametersError, NoValidNError, NotUnitaryError
from core.linalg import ComplexMatrix, as_matrix, expm_unitary, identity_up_to_phase, is_unitary
from core.pulses import Model, propagate, refocusing_sequence
from core.spin_system import SpinChainParams, spin_op, target_common_frame, zz_coupling

logger = logging.getLogger(__name__)

PHASE_SNAP_TOL = 1e-6
UNITARY_TOL = 1e-8
LANDSCAPE_COLUMNS = ["tau_tilde", "omega_tilde", "fidelity"]
REFINE_STARTS = 3


@dataclass(frozen=True)
class SoftPulseSolution:
    n: int
    omega_plus: float
    omega_minus: float
    tau: float


class CancellationCheck(NamedTuple):
    ok: bool
    phi: float


@dataclass(frozen=True)
class FidelityLandscape:
    """
    Fidelity sampled on a rectangular grid over the unit square.

    ``fidelity[i, j]`` belongs to ``(tau_tilde[i], omega_tilde[j])``; samples
    are row-major with τ̃ as the outer index.
    """

    tau_tilde: np.ndarray
    omega_tilde: np.ndarray
    fidelity: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.fidelity.shape

    def samples(self) -> List[Tuple[float, float, float]]:
        return [
            (float(t), float(w), float(self.fidelity[i, j]))
            for i, t in enumerate(self.tau_tilde)
            for j, w in enumerate(self.omega_tilde)
        ]

    def best(self, include_merged: bool = True) -> Tuple[float, float, float]:
        """
        Highest sample. With ``include_merged=False`` rows at τ̃ = 1, where the
        pulses touch and no free evolution is left, are skipped.
        """
        rows = np.arange(len(self.tau_tilde))
        if not include_merged:
            rows = rows[self.tau_tilde < 1.0]
        block = self.fidelity[rows]
        i, j = np.unravel_index(int(np.argmax(block)), block.shape)
        i = rows[i]
        return float(self.tau_tilde[i]), float(self.omega_tilde[j]), float(self.fidelity[i, j])

    def merged_best(self) -> Tuple[float, float, float]:
        """Highest sample on the τ̃ = 1 row (merged pulses)."""
        i = int(np.argmax(self.tau_tilde))
        j = int(np.argmax(self.fidelity[i]))
        return float(self.tau_tilde[i]), float(self.omega_tilde[j]), float(self.fidelity[i, j])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.samples(), columns=LANDSCAPE_COLUMNS)


@dataclass(frozen=True)
class OptimizationResult:
    tau_tilde: float
    omega_tilde: float
    fidelity: float
    tau_s: float
    omega1: float
    grid_best: Tuple[float, float, float]
    evaluations: int
    merged_best: Optional[Tuple[float, float, float]] = None


def _radicand(alpha: float, j12: float, j23: float, n: int) -> float:
    return 4 * np.pi ** 2 * n ** 2 * j23 ** 2 / alpha ** 2 - j12 ** 2 / 4


def min_valid_n(alpha: float, j12: float, j23: float) -> int:
    """Smallest n >= 1 with a positive amplitude radicand."""
    if not alpha > 0 or not j23 > 0:
        raise InvalidParametersError("alpha and j23 must be positive")
    n = 1
    while _radicand(alpha, j12, j23, n) <= 0:
        n += 1
    return n


def soft_amplitude(alpha: float, j12: float, j23: float, n: int) -> SoftPulseSolution:
    """
    Amplitudes ω± that cancel the J12 evolution over ``τ = α/J23``.

    Args:
        alpha: Entangling angle (rad).
        j12: Coupling to be suppressed (rad/s).
        j23: Coupling that produces the gate (rad/s).
        n: Branch index.

    Raises:
        NoValidNError: If the radicand is not positive for this ``n``.
    """
    radicand = _radicand(alpha, j12, j23, n)
    if not radicand > 0:
        raise NoValidNError(f"radicand {radicand:.6g} is not positive for n={n}")
    omega = float(np.sqrt(radicand))
    return SoftPulseSolution(n=n, omega_plus=omega, omega_minus=-omega, tau=alpha / j23)


def solve_soft_pulse(alpha: float, j12: float, j23: float) -> SoftPulseSolution:
    return soft_amplitude(alpha, j12, j23, min_valid_n(alpha, j12, j23))


def _wrap(angle: float) -> float:
    return float((angle + np.pi) % (2 * np.pi) - np.pi)


def verify_cancellation(omega1: float, alpha: float, p: SpinChainParams,
                        tol: float = 1e-9) -> CancellationCheck:
    """
    Check that the rf term and the J12 coupling exponentiate to ``e^{iφ} I``.

    On success ``phi`` is snapped onto the ``2πk/8`` lattice; a phase off the
    lattice by more than ``PHASE_SNAP_TOL`` counts as failure.
    """
    if not alpha > 0:
        raise InvalidParametersError(f"alpha must be positive, got {alpha}")
    residual = omega1 * spin_op("x", 1) + p.j12 * zz_coupling(1, 2)
    check = identity_up_to_phase(expm_unitary(residual, alpha / p.j23), tol)
    if not check.is_phase_identity:
        return CancellationCheck(False, check.phi)
    if abs(_wrap(check.phi - check.lattice_phi)) > PHASE_SNAP_TOL:
        logger.warning("phase %.12g is off the 2πk/8 lattice", check.phi)
        return CancellationCheck(False, check.phi)
    return CancellationCheck(True, check.lattice_phi)


def propagator_fidelity(u: ComplexMatrix, v: ComplexMatrix) -> float:
    """Global-phase-insensitive overlap ``|Tr(u† v)| / dim``."""
    a, b = as_matrix(u), as_matrix(v)
    if not (is_unitary(a, UNITARY_TOL) and is_unitary(b, UNITARY_TOL)):
        raise NotUnitaryError("propagator fidelity is defined for unitary operands only")
    value = abs(np.trace(a.conj().T @ b)) / a.shape[0]
    return float(min(max(value, 0.0), 1.0))


def normalized_to_physical(tau_tilde: float, omega_tilde: float,
                           p: SpinChainParams) -> Tuple[float, float]:
    """(τ̃, ω̃₁) to (τ in s, ω₁ in rad/s); ω₁ is 0 for a zero-width pulse."""
    tau = tau_tilde * np.pi / (2 * p.j23)
    omega1 = omega_tilde * np.pi / tau if tau > 0 else 0.0
    return float(tau), float(omega1)


def refocusing_propagator_full(tau_tilde: float, omega_tilde: float, p: SpinChainParams,
                               phase: float = 0.0) -> ComplexMatrix:
    if not 0 <= tau_tilde <= 1:
        raise BadTimingError(f"tau_tilde must lie in [0, 1], got {tau_tilde}")
    tau, omega1 = normalized_to_physical(tau_tilde, omega_tilde, p)
    seq = refocusing_sequence(np.pi / p.j23, tau, omega1, Model.FULL, phase)
    return propagate(seq, p)


def fidelity_at(tau_tilde: float, omega_tilde: float, p: SpinChainParams,
                phase: float = 0.0) -> float:
    """Fidelity of the full-model refocusing sequence against the common-frame target."""
    return propagator_fidelity(
        target_common_frame(p),
        refocusing_propagator_full(tau_tilde, omega_tilde, p, phase),
    )


def landscape_scan(p: SpinChainParams, nx: int, ny: int, workers: int = 1) -> FidelityLandscape:
    """
    Evaluate the fidelity on an ``nx`` by ``ny`` grid including the edges.

    Args:
        p: Chain parameters.
        nx: Number of τ̃ samples.
        ny: Number of ω̃₁ samples.
        workers: Thread count; the result does not depend on it.
    """
    if nx < 2 or ny < 2:
        raise InvalidParametersError("landscape grids need at least 2 points per axis")
    tau_axis = np.linspace(0.0, 1.0, nx)
    omega_axis = np.linspace(0.0, 1.0, ny)
    points = [(t, w) for t in tau_axis for w in omega_axis]

    def evaluate(point):
        return fidelity_at(point[0], point[1], p)

    logger.info("scanning %dx%d fidelity landscape for %s", nx, ny, p.label or "molecule")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, points))
    else:
        values = [evaluate(point) for point in points]
    return FidelityLandscape(
        tau_tilde=tau_axis,
        omega_tilde=omega_axis,
        fidelity=np.asarray(values, dtype=float).reshape(nx, ny),
    )


def _initial_simplex(x0: np.ndarray, steps: np.ndarray, upper: np.ndarray) -> np.ndarray:
    vertices = [x0.copy()]
    for axis in range(2):
        vertex = x0.copy()
        vertex[axis] += steps[axis] if x0[axis] + steps[axis] <= upper[axis] else -steps[axis]
        vertices.append(vertex)
    return np.array(vertices)


def _grid_peaks(landscape: FidelityLandscape, rows: int, limit: int) -> List[Tuple[float, float, float]]:
    """Local maxima of the first ``rows`` τ̃ rows, best first."""
    block = landscape.fidelity[:rows]
    peaks = np.argwhere(block >= maximum_filter(block, size=3, mode="nearest"))
    values = block[peaks[:, 0], peaks[:, 1]]
    order = np.argsort(-values, kind="stable")[:limit]
    return [
        (float(landscape.tau_tilde[i]), float(landscape.omega_tilde[j]), float(block[i, j]))
        for i, j in peaks[order]
    ]


def optimize_fidelity(p: SpinChainParams, nx: int = 101, ny: int = 101,
                      workers: int = 1, starts: int = REFINE_STARTS) -> OptimizationResult:
    """
    Coarse grid scan followed by bounded Nelder-Mead refinement of ``1 - F``.

    The search covers refocusing sequences with free evolution left between
    the pulses: τ̃ runs up to the last grid row below 1. The τ̃ = 1 row is the
    merged-pulse (soft-pulse) point and is reported separately as
    ``merged_best``. Refinement starts from the ``starts`` best local maxima
    of the grid, each simplex with edges of one grid spacing, so runs are
    deterministic.
    """
    if nx < 3:
        raise InvalidParametersError("optimization needs at least 3 tau_tilde samples")
    landscape = landscape_scan(p, nx, ny, workers)
    grid_best = landscape.best(include_merged=False)
    evaluations = nx * ny
    upper = np.array([landscape.tau_tilde[-2], 1.0])

    def objective(x):
        t, w = np.clip(x, 0.0, upper)
        return 1.0 - fidelity_at(float(t), float(w), p)

    steps = np.array([1.0 / (nx - 1), 1.0 / (ny - 1)])
    tau_tilde, omega_tilde, fidelity = grid_best
    for start in _grid_peaks(landscape, nx - 1, starts):
        x0 = np.array(start[:2])
        result = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=[(0.0, upper[0]), (0.0, 1.0)],
            options={"xatol": 1e-4, "fatol": 1e-6,
                     "initial_simplex": _initial_simplex(x0, steps, upper)},
        )
        evaluations += int(result.nfev)
        refined = 1.0 - float(result.fun)
        logger.debug("refined start (%.4g, %.4g) to F=%.8g", start[0], start[1], refined)
        if refined > fidelity:
            tau_tilde, omega_tilde = (float(v) for v in np.clip(result.x, 0.0, upper))
            fidelity = refined
    if (tau_tilde, omega_tilde) == grid_best[:2]:
        logger.info("refinement did not improve on the grid; keeping grid optimum")
    tau_s, omega1 = normalized_to_physical(tau_tilde, omega_tilde, p)
    logger.info("optimum tau~=%.6g omega~=%.6g F=%.6g", tau_tilde, omega_tilde, fidelity)
    return OptimizationResult(
        tau_tilde=tau_tilde,
        omega_tilde=omega_tilde,
        fidelity=fidelity,
        tau_s=tau_s,
        omega1=omega1,
        grid_best=grid_best,
        evaluations=evaluations,
        merged_best=landscape.merged_best(),
    )


def fidelity_profile(p: SpinChainParams, axis: str, fixed: float = 1.0, n: int = 101) -> pd.DataFrame:
    """
    Line cut through the landscape.

    ``axis="tau"`` varies τ̃ at ω̃₁ = ``fixed`` (``fixed=1`` is conventional
    refocusing); ``axis="omega"`` varies ω̃₁ at τ̃ = ``fixed``.
    """
    if axis not in ("tau", "omega"):
        raise InvalidParametersError(f"axis must be 'tau' or 'omega', got {axis!r}")
    values = np.linspace(0.0, 1.0, n)
    rows = []
    for value in values:
        t, w = (value, fixed) if axis == "tau" else (fixed, value)
        rows.append((float(t), float(w), fidelity_at(t, w, p)))
    return pd.DataFrame(rows, columns=LANDSCAPE_COLUMNS)


def soft_pulse_fidelity(p: SpinChainParams) -> Tuple[float, float]:
    """
    The soft pulse expressed on the landscape: τ̃ = 1, ω̃₁ = ω_sp / (2 J23).

    Returns:
        Tuple of (ω̃₁ of the soft pulse, its fidelity).
    """
    solution = solve_soft_pulse(np.pi, p.j12, p.j23)
    omega_tilde = solution.omega_plus / (2 * p.j23)
    return float(omega_tilde), fidelity_at(1.0, omega_tilde, p)
