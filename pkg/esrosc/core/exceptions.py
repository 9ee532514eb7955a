"""
Exception hierarchy for esrosc.

InputError subclasses signal invalid inputs (CLI exit code 2),
NumericalError subclasses signal numerical failures (CLI exit code 3).
"""


class ESRError(Exception):
    """Base class for all esrosc errors."""


class InputError(ESRError, ValueError):
    """Invalid input or violated precondition."""


class NumericalError(ESRError, ArithmeticError):
    """A computation could not produce a meaningful result."""


class ConfigError(InputError):
    """Run configuration is malformed or inconsistent."""


class ParseError(ConfigError):
    """A profile or state document could not be parsed."""


class OutOfRange(InputError):
    """A probability or parameter lies outside its admissible range."""


class InvalidRange(InputError):
    """An interval or grid range is empty or reversed."""


class LengthMismatch(InputError):
    """Sample count does not match the grid point count."""


class RepresentationMismatch(InputError):
    """States live in different bases, grids or oscillators."""


class IndexBeyondTruncation(InputError):
    """A level index exceeds the Fock truncation N_max."""


class InvalidSelection(InputError):
    """A Borel-set selection is malformed."""


class SelectionContainsQ0(InputError):
    """Conditional probabilities are undefined for selections containing q0."""


class BinGapDetected(InputError):
    """Position bins leave part of the grid uncovered."""


class InvalidNoRegistrationValue(InputError):
    """The no-registration value collides with the spectrum."""


class GridTooSmall(NumericalError):
    """The position grid does not hold the state's probability mass."""


class TruncationLoss(NumericalError):
    """Projection onto the truncated Fock basis lost too much norm."""


class ZeroNorm(NumericalError):
    """A state with (numerically) zero norm cannot be normalized."""


class ZeroProbabilityOutcome(NumericalError):
    """The requested outcome has (numerically) zero probability."""


class DetectionCertain(NumericalError):
    """The no-detection branch has zero probability."""
