"""Exception types raised by the solvers and experiment drivers.

Every validation failure names the violated condition so that a bad
config dies before any computation starts.
"""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SimulationError, ValueError):
    """A model or scheme constant violates its admissibility condition."""


class NonPositiveCoefficient(ParameterError):
    pass


class GammaNotBelowEta(ParameterError):
    pass


class NuConditionViolated(ParameterError):
    """min(nu1, nu2) <= 1: the state bounds are not entrance boundaries."""

    def __init__(self, nu1, nu2):
        self.nu1 = nu1
        self.nu2 = nu2
        super().__init__(
            f"need min(nu1, nu2) > 1 for unattainable bounds, got "
            f"nu1={nu1:.6g}, nu2={nu2:.6g}"
        )


class DomainViolation(SimulationError, ValueError):
    """A state argument lies outside the domain of the requested function."""


class StepTooLarge(ParameterError):
    """SDE time step is not below the admissible bound delta_star."""


class StabilityViolated(ParameterError):
    """dbar = dt/dx^2 exceeds 1/2."""


class InitialCalciteTooLarge(ParameterError):
    """c0_bar >= (4/5) phi1/|phi2|, breaking scheme positivity."""


class TimeStepTooLarge(ParameterError):
    """PDE time step exceeds the reaction-aware positivity bound."""


class NonFiniteState(SimulationError, FloatingPointError):
    """A solver state turned NaN/Inf mid-run (step-size condition violated)."""


class InsufficientPaths(SimulationError, ValueError):
    pass


class GridsNotNested(SimulationError, ValueError):
    pass


class GridMismatch(SimulationError, ValueError):
    pass


class ConfigParseError(SimulationError, ValueError):
    pass
