"""Exception hierarchy shared by the solvers and the command line."""


class PistonError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PistonError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(PistonError, RuntimeError):
    """A root finder or time integrator failed to converge.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (bracket ends, function values, iteration counts).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        msg = super().__str__()
        if not self.diagnostics:
            return msg
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{msg} ({extra})"


class ConcentrationRegime(PistonError):
    """No bounded shock exists: mass concentrates on the piston.

    Raised for the generalized Chaplygin limit (A = 0) when
    alpha * M0**2 >= 1.  Use :mod:`mcg_piston.limits` for the measure
    solution in that regime.
    """


class SimulationError(PistonError, RuntimeError):
    """The finite-volume solver produced a non-finite state."""
