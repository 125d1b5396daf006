"""Exception types shared across the package.

Everything derives from KnotpotError so callers can catch the library
wholesale; the finer classes separate "your input is bad" from "the
computation ran into geometry" (obstructed paths, flat solutions),
which the CLI maps to distinct exit codes.
"""


class KnotpotError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KnotpotError, ValueError):
    """Argument outside the mathematical domain of a special function."""


class StepTooLargeError(KnotpotError):
    """continue_log could not pick a branch within a quarter turn.

    Signals the continuation driver to halve its step; it is not a
    user-facing failure unless halving bottoms out.
    """


class SpecFormatError(KnotpotError, ValueError):
    """Potential spec document failed to parse."""


class ValidationError(KnotpotError, ValueError):
    """Potential spec document parsed but violates an invariant."""


class SingularPointError(KnotpotError, ValueError):
    """Parameter point sits on a singularity of the potential.

    Raised when a variable vanishes, a dilogarithm argument hits 1, or
    a residual denominator vanishes; the message names the offender.
    """


class DegenerateModulusError(KnotpotError, ValueError):
    """A tetrahedron modulus is 0 or 1 (flat tetrahedron)."""


class ZeroDenominatorError(KnotpotError, ValueError):
    """Slope with q = 0 (meridian filling is out of scope)."""


class SingularJacobianError(KnotpotError):
    """Newton hit a Jacobian with condition estimate above 1e14."""


class NoConvergenceError(KnotpotError):
    """Newton exhausted its iterations; carries the best residual seen."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class NoGeometricRootError(KnotpotError):
    """Every converged root of the complete-structure system is flat."""


class PathObstructionError(KnotpotError):
    """Continuation path hit a singularity or a degenerate filling.

    For Dehn filling this usually means the slope is exceptional; the
    CLI reports it as data, not as a crash.
    """

    def __init__(self, message, t_reached=None):
        super().__init__(message)
        self.t_reached = t_reached
