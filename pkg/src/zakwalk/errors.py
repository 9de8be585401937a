"""Exception hierarchy.

Domain errors (singularities, degenerate parameters) derive from
:class:`DomainError`; the CLI maps them to exit code 3.
"""


class ZakwalkError(Exception):
    """Base class for every error raised by the package."""


class InternalError(ZakwalkError, RuntimeError):
    """A closed-form expression left its mathematically allowed range."""


class DomainError(ZakwalkError, ValueError):
    """Inputs are valid numbers but the requested quantity is undefined."""


class SingularPoint(DomainError):
    """The quasi-energy gap is closed (or a denominator vanishes) at a point."""


class SingularPath(DomainError):
    """A k-path touches a gap closure, so a phase along it is undefined."""


class NoConvergence(DomainError):
    """Grid refinement hit its node limit before reaching tolerance."""


class UndefinedArgument(DomainError):
    """Both in-plane norm components vanish; the Bloch argument has no value."""


class DegenerateTheta1(DomainError):
    """tan(theta1) is zero, so the TRS inequality cannot be evaluated."""


class DivisionByZero(DomainError, ZeroDivisionError):
    """A closed-form ratio has a vanishing denominator."""


class WrongVariant(DomainError, TypeError):
    """The operation is only defined for a different walk protocol."""


class VanishingOverlap(DomainError):
    """|<psi_i|psi_f>| is too small for its phase to be meaningful."""


class AmbiguousBinning(DomainError):
    """Two lattice sites land in the same arrival-time bin."""
