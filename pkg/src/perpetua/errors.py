"""Exception hierarchy.

Every error raised on purpose by this package derives from PerpetuaError so
callers can catch the whole family with one clause.  Precondition failures
carry the machine-readable name of the violated requirement.
"""


class PerpetuaError(Exception):
    """Base class for all package-specific errors."""


class NonFiniteParameter(PerpetuaError, ValueError):
    """A triplet or family parameter is out of range or not finite."""

    def __init__(self, issues):
        self.issues = list(issues)
        msgs = "; ".join(f"{i.code}: {i.message}" for i in self.issues)
        super().__init__(msgs)


class PreconditionViolation(PerpetuaError):
    """An operation was called on inputs that fail its stated preconditions."""

    def __init__(self, reason, message=""):
        self.reason = reason
        super().__init__(f"{reason}: {message}" if message else reason)


class QuadratureFailure(PerpetuaError):
    """Numerical integration produced non-finite values."""


class InversionUnstable(PerpetuaError):
    """Fourier inversion error estimate exceeded the allowed fraction of the value."""


class EvaluationError(PerpetuaError):
    """A test function returned negative or non-finite values."""


class StepTooCoarse(PerpetuaError):
    """Expected jump count per time step exceeds the resolvable budget."""


class BandwidthTooSmall(PerpetuaError):
    """Local-time bandwidth is below the resolution floor set by dt."""


class NotReachedError(PerpetuaError):
    """A first-passage simulation exhausted its horizon cap before crossing."""


class ConfigError(PerpetuaError):
    """Experiment configuration is malformed; carries field diagnostics."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
