"""Exception types shared across the package."""


class DecmechError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(DecmechError, ValueError):
    """A model invariant was violated; the message names the invariant."""


class ParseError(DecmechError, ValueError):
    """A game-spec document is malformed."""


class IoError(DecmechError, OSError):
    """Reading or writing a file failed."""


class ZeroProbabilitySignal(DecmechError, ValueError):
    """A posterior was requested conditional on a zero-probability signal."""


class InconsistentSupport(DecmechError, ValueError):
    """A signal occurs with positive probability under the true state
    distribution but the user's belief assigns it zero probability."""


class SpaceTooLarge(DecmechError, ValueError):
    """The requested policy space exceeds the enumeration cap."""


class NumericalFailure(DecmechError, RuntimeError):
    """The LP solver could not restore feasibility within tolerance."""


class PreconditionViolated(DecmechError, ValueError):
    """An operation was called outside its stated precondition."""


class UnsupportedDimension(DecmechError, ValueError):
    """Exact geometry is only available for two or three states."""


class NotCredible(DecmechError, ValueError):
    """The generator violates incentive compatibility."""


class DegenerateDenominator(DecmechError, ValueError):
    """A closed-form threshold has a zero denominator."""


class InvalidParams(ValidationError):
    """Case-study parameters violate a sign or range constraint."""


class EmptyGrid(DecmechError, ValueError):
    """A search grid contains no candidates."""


class UnknownFigure(DecmechError, ValueError):
    """Unrecognized figure identifier."""


class OffSupportSignalWarning(UserWarning):
    """A type's belief assigns zero probability to an observed signal; the
    prior best response is used for that type."""


class DegenerateFitWarning(UserWarning):
    """The reference type's utility is constant per state, so the scaling
    factor of the linear-dependence fit is unidentifiable."""
