from .exceptions import SoftPulseError
from .pulses import Model, PulseSegment, PulseSequence, propagate
from .spin_system import SpinChainParams

__all__ = ['SoftPulseError', 'Model', 'PulseSegment', 'PulseSequence', 'propagate', 'SpinChainParams']
