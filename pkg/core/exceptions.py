"""Error types raised by the softpulse library."""


class SoftPulseError(Exception):
    """Base class for every error raised by softpulse."""


class NotHermitianError(SoftPulseError):
    """A matrix expected to be Hermitian is not (max-norm check)."""


class NotUnitaryError(SoftPulseError):
    """A matrix expected to be unitary is not."""


class BadDimensionError(SoftPulseError):
    """An operand has the wrong shape for the requested operation."""


class BadIndexError(SoftPulseError):
    """A qubit index lies outside the register."""


class InvalidStateError(SoftPulseError):
    """A state vector is not normalized or not finite."""


class ZeroAlphaError(SoftPulseError):
    """An entangling angle of zero was requested."""


class BadTimingError(SoftPulseError):
    """Pulse timings do not fit inside the requested schedule."""


class NoValidNError(SoftPulseError):
    """The soft-pulse amplitude radicand is not positive for the given n."""


class ZeroDetuningError(SoftPulseError):
    """A Bloch-Siegert quantity was requested for a zero detuning."""


class ZeroAmplitudeError(SoftPulseError):
    """A pi-pulse quantity was requested for a zero rf amplitude."""


class BadChannelError(SoftPulseError):
    """Channel probabilities are negative or do not sum to one."""


class ConfigParseError(SoftPulseError):
    """A molecule file is not well-formed structured text."""

    def __init__(self, path: str, message: str, line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = f"{path}:{line}:{column}" if line is not None else path
        super().__init__(f"{where}: {message}")


class ConfigValidationError(SoftPulseError):
    """A molecule file parsed but its fields are missing or invalid."""

    def __init__(self, path: str, problems: list[str]):
        self.path = path
        self.problems = problems
        super().__init__(f"{path}: " + "; ".join(problems))


class InvalidParametersError(SoftPulseError, ValueError):
    """Chain parameters violate their sign constraints."""
