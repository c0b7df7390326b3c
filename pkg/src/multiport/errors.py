"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto its exit-code categories, so raising the right
class matters more than the message text.
"""


class MultiportError(Exception):
    """Base class for all package errors."""


class ConfigError(MultiportError):
    """Malformed configuration input (file, flag, or value syntax)."""


class SpecError(MultiportError):
    """Structurally valid input that violates a device or graph contract."""


class CapacityError(SpecError):
    """Photon-number overflow beyond the configured maximum."""


class DimensionMismatchError(SpecError):
    """Operator and state dimensions disagree."""


class ConvergenceError(MultiportError):
    """An iterative or extrapolated quantity refused to converge."""


class NumericError(MultiportError):
    """A numerical routine produced residuals above tolerance."""


class InvariantViolation(MultiportError):
    """An internal consistency check failed; indicates a bug, not bad input."""
