"""Exception hierarchy shared by all squeezelab modules."""


class SqueezeLabError(Exception):
    """Base class for every error raised by squeezelab."""


class NumericalError(SqueezeLabError):
    """A numerical routine failed to deliver a trustworthy value."""


class NonConvergence(NumericalError):
    """Adaptive quadrature or refinement ran out of budget before meeting tolerance."""


class CostBudgetExceeded(NumericalError):
    """A tensorized quadrature would need more integrand evaluations than allowed."""


class StepFailure(NumericalError):
    """The ODE stepper could not advance without going below its minimum step."""


class NoSignChange(NumericalError):
    """Root bracket does not enclose a sign change."""


class BranchSingularity(NumericalError):
    """A world line runs into the logarithmic singularity of Chi at zero argument."""

    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


class DomainError(SqueezeLabError, ValueError):
    """Argument outside the mathematical domain of a function."""


class InsufficientData(SqueezeLabError, ValueError):
    pass


class NonPositiveSample(SqueezeLabError, ValueError):
    pass


class EmptyBundle(SqueezeLabError, ValueError):
    pass


class CWSpectrumRequested(SqueezeLabError, ValueError):
    """A pointwise spectral value of a CW drive was requested; only its delta lines exist."""


class CWNotSupported(SqueezeLabError, ValueError):
    """Operation is only defined for pulsed drives."""


class NotDifferentiable(SqueezeLabError, ValueError):
    pass
