"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: configuration and usage
problems exit 1, data problems exit 2, numeric faults exit 3.
"""


class BlendtalkError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BlendtalkError):
    """Invalid configuration value or inconsistent option combination."""


class ContractError(BlendtalkError):
    """A caller violated an API contract (wrong kind of argument)."""


class ShapeError(BlendtalkError):
    """Array shape or dimension mismatch."""


class StepRangeError(BlendtalkError):
    """Diffusion step index outside the schedule's valid range."""


class SingularityError(BlendtalkError):
    """An operation hit a vanishing denominator."""


class NormalizationError(BlendtalkError):
    """Attempt to normalize a zero-length vector."""


class NumericFault(BlendtalkError):
    """Non-finite values appeared where finite math was expected."""


class DataError(BlendtalkError):
    """Corpus or sequence data violates a precondition."""


class ParseError(DataError):
    """A sequence or manifest file failed to parse."""


class EnrollmentError(DataError):
    """Identity library enrollment conflict."""


class MatchError(DataError):
    """Identity lookup against an empty or inconsistent library."""
