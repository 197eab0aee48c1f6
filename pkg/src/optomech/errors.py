"""Exception hierarchy shared by all modules."""


class OptomechError(Exception):
    """Base class for every error raised by the package."""


class DomainError(OptomechError, ValueError):
    """An input lies outside the domain where a formula is defined."""


class OverdampedError(DomainError):
    """The mechanical oscillator is not underdamped (Omega**2 <= gamma_m**2 / 4)."""


class ConfigError(OptomechError, ValueError):
    """A configuration file or command-line value could not be understood."""


class ExtrapolationError(DomainError):
    """A tabulated occupation was queried outside its grid in strict mode."""


class QuadratureError(OptomechError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class DivergentIntegralError(OptomechError, ArithmeticError):
    """The requested integral does not exist (integrand does not decay)."""


class DegenerateError(OptomechError, ArithmeticError):
    """A polynomial has a vanishing leading coefficient."""


class SingularError(OptomechError, ArithmeticError):
    """A linear problem has no unique solution (e.g. non-Hurwitz drift)."""


class DegeneratePairingError(OptomechError, ArithmeticError):
    """Roots of the characteristic polynomial do not form reflected pairs."""


class BranchConditionError(OptomechError, ArithmeticError):
    """Neither closed-form branch of the resonant pole formulas applies."""


class ValidityError(OptomechError, ArithmeticError):
    """A weak-coupling approximation is used outside its validity region."""


class NegativeSquaredFrequencyError(ValidityError):
    """An effective squared frequency came out negative."""


class InstabilityError(OptomechError, ArithmeticError):
    """The operating point is dynamically unstable."""
