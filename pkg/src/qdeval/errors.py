"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """An enumeration would exceed the configured size cap."""


class NumericError(ArithmeticError):
    """A numerical routine failed to converge or produced inconsistent output."""


class SupportMismatchError(ValueError):
    """The model distribution puts mass where the reference has none, under a
    kernel that is undefined at zero."""


class NotADivergenceError(ValueError):
    """The metric pair does not induce a divergence (fails the affine-integral
    pairing condition)."""


class DegenerateInputError(ValueError):
    """The input distribution is degenerate for this operation (e.g. uniform
    where a non-uniform reference is required)."""


class EmptyCorpusError(ValueError):
    """Corpus filtering removed every sentence."""


class EmptyDistributionError(ValueError):
    """No n-grams could be extracted at the requested order."""


class ExtrapolationError(ValueError):
    """The query point lies outside the span of the interpolation curve."""


class UnsupportedKernelError(ValueError):
    """The kernel cannot be integrated or inverted as required."""
