import logging
from typing import Any, Callable, Dict, Optional

import numpy as np

from analysis.bloch_siegert import bs_sequence_total, bs_table
from analysis.gate_design import (
    fidelity_at,
    optimize_fidelity,
    soft_pulse_fidelity,
    solve_soft_pulse,
    verify_cancellation,
)
from analysis.qec import CorrelatedChannel, operator_identity_check, soft_pulse_recovery_fidelity
from core.spin_system import TWO_PI, SpinChainParams

logger = logging.getLogger(__name__)

HARD_PULSE_TAU = 0.700e-3
WORKFLOW_STEPS = ('bs_hard', 'soft_pulse', 'fidelity', 'optimum', 'qec')


class SoftPulseWorkflow:
    """Runs the soft-pulse design analysis for one molecule, step by step"""

    def __init__(self, params: SpinChainParams, on_step: Optional[Callable[[str], None]] = None):
        self.params = params
        self.on_step = on_step

    def run_analysis(self, optimize: bool = True, qec_trials: int = 50,
                     landscape_workers: int = 1) -> Dict[str, Any]:
        """
        Run every analysis step in order

        Args:
            optimize (bool): Include the 101x101 landscape optimization (slowest step)
            qec_trials (int): Random trials for the soft-pulse QEC run; 0 skips it
            landscape_workers (int): Threads for the landscape scan

        Returns:
            Dict[str, Any]: One entry per step, plus 'errors' for failed steps
        """
        report: Dict[str, Any] = {'molecule': self.params.to_hz(), 'errors': {}}
        steps = [
            ('bs_hard', self._bs_hard),
            ('soft_pulse', self._soft_pulse),
            ('fidelity', self._fidelity),
        ]
        if optimize:
            steps.append(('optimum', lambda: self._optimum(landscape_workers)))
        steps.append(('qec', lambda: self._qec(qec_trials)))

        for name, step in steps:
            if self.on_step:
                self.on_step(name)
            try:
                report[name] = step()
            except Exception as e:
                logger.exception("workflow step %s failed", name)
                report['errors'][name] = f"{type(e).__name__}: {e}"
        return report

    def _bs_hard(self) -> Dict[str, Any]:
        p = self.params
        omega1 = np.pi / HARD_PULSE_TAU
        table = bs_table(p, omega1, HARD_PULSE_TAU)
        return {
            'omega1_hz': omega1 / TWO_PI,
            'tau_ms': HARD_PULSE_TAU * 1e3,
            'rows': table.to_dict(orient='records'),
            'pair_totals_rad': {
                'q2': bs_sequence_total(omega1, p.delta12, HARD_PULSE_TAU),
                'q3': bs_sequence_total(omega1, p.delta13, HARD_PULSE_TAU),
            },
        }

    def _soft_pulse(self) -> Dict[str, Any]:
        p = self.params
        solution = solve_soft_pulse(np.pi, p.j12, p.j23)
        check = verify_cancellation(solution.omega_plus, np.pi, p)
        table = bs_table(p, solution.omega_plus, solution.tau)
        return {
            'n': solution.n,
            'omega1_hz': solution.omega_plus / TWO_PI,
            'tau_ms': solution.tau * 1e3,
            'cancellation_ok': check.ok,
            'phi_rad': check.phi,
            'rows': table.to_dict(orient='records'),
        }

    def _fidelity(self) -> Dict[str, Any]:
        p = self.params
        hard_tilde = 2 * p.j23 * HARD_PULSE_TAU / np.pi
        soft_omega_tilde, soft_f = soft_pulse_fidelity(p)
        return {
            'hard_tau_tilde': hard_tilde,
            'hard_refocusing': fidelity_at(hard_tilde, 1.0, p),
            'merged_pulses': fidelity_at(1.0, 1.0, p),
            'soft_omega_tilde': soft_omega_tilde,
            'soft_pulse': soft_f,
        }

    def _optimum(self, workers: int) -> Dict[str, Any]:
        result = optimize_fidelity(self.params, workers=workers)
        return {
            'tau_tilde': result.tau_tilde,
            'omega_tilde': result.omega_tilde,
            'fidelity': result.fidelity,
            'tau_s': result.tau_s,
            'omega1_hz': result.omega1 / TWO_PI,
            'grid_fidelity': result.grid_best[2],
            'evaluations': result.evaluations,
            'merged_omega_tilde': result.merged_best[1],
            'merged_fidelity': result.merged_best[2],
        }

    def _qec(self, trials: int) -> Dict[str, Any]:
        ideal = operator_identity_check(ideal=True)
        summary: Dict[str, Any] = {
            'ideal_identities_hold': all(check.holds for check in ideal),
            'ideal_phases_rad': [check.phase for check in ideal],
        }
        if trials > 0:
            stats = soft_pulse_recovery_fidelity(self.params, CorrelatedChannel.uniform(), trials)
            summary.update({
                'trials': stats.trials,
                'soft_recovery_min': stats.min,
                'soft_recovery_mean': stats.mean,
            })
        return summary

    def get_workflow_summary(self, report: Dict[str, Any]) -> Dict[str, Any]:
        """
        Compact view of a report for metrics and logging

        Args:
            report (Dict[str, Any]): Output of run_analysis

        Returns:
            Dict[str, Any]: Headline numbers; missing steps are None
        """
        if not report:
            return {}

        soft = report.get('soft_pulse', {})
        fidelity = report.get('fidelity', {})
        optimum = report.get('optimum', {})
        qec = report.get('qec', {})

        return {
            'molecule': report.get('molecule', {}).get('label', ''),
            'steps_completed': [name for name in WORKFLOW_STEPS if name in report],
            'steps_failed': sorted(report.get('errors', {})),
            'soft_omega1_hz': soft.get('omega1_hz'),
            'soft_tau_ms': soft.get('tau_ms'),
            'soft_fidelity': fidelity.get('soft_pulse'),
            'hard_fidelity': fidelity.get('hard_refocusing'),
            'optimum_fidelity': optimum.get('fidelity'),
            'qec_identities_hold': qec.get('ideal_identities_hold'),
            'qec_recovery_min': qec.get('soft_recovery_min'),
        }
