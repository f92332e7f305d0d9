"""Exception hierarchy shared across the package.

The CLI maps each class to a distinct exit code, so keep the split coarse:
bad inputs, refusals to enumerate, and unmet mathematical hypotheses.
"""


class SharpThresholdError(Exception):
    """Base class for package errors."""


class SizeLimitError(SharpThresholdError):
    """An exact-enumeration path was asked to handle more states than allowed."""


class HypothesisError(SharpThresholdError):
    """A verifier's mathematical hypotheses are violated (distinct from a
    verdict failure: the statement under test never applied)."""
