from .bloch_siegert import BsReport, bs_report, bs_table
from .gate_design import FidelityLandscape, OptimizationResult, SoftPulseSolution, optimize_fidelity
from .qec import CorrelatedChannel, RecoveryStats

__all__ = [
    'BsReport', 'bs_report', 'bs_table',
    'FidelityLandscape', 'OptimizationResult', 'SoftPulseSolution', 'optimize_fidelity',
    'CorrelatedChannel', 'RecoveryStats',
]
