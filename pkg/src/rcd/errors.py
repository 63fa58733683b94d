"""Exception types shared across the package."""


class RcdError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RcdError):
    """Malformed input: bad shapes, non-numeric data, out-of-range options."""


class DegenerateInput(RcdError):
    """A sample vector carries no usable variation (all entries equal)."""


class UnsupportedSampleSize(RcdError):
    """Sample size outside the validity range of a statistical procedure."""
