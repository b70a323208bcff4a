"""Exception hierarchy shared by every module."""


class EbthError(Exception):
    """Base class for all errors raised by this package."""


class MissingGenerator(EbthError):
    """An evaluation assignment does not cover some generator."""


class ZeroDenominator(EbthError):
    """A generator that must stay invertible was assigned zero."""


class VariableSetMismatch(EbthError):
    """Arithmetic between time polynomials with different variables or caps."""


class WindowOverflow(EbthError):
    """A coefficient outside the guaranteed-exact window was requested."""


class EmptyWindow(EbthError):
    """No exact coefficients remain after an operation."""


class DeriveUnsupported(EbthError):
    """The coefficient ring cannot supply the required x-derivative."""


class AmbiguousTail(EbthError):
    """A truncated tail crosses the projection boundary on the kept side."""


class DpartUnsupported(EbthError):
    """The operation cannot handle a derivative part."""


class NotInvertible(EbthError):
    """Operator or ring element has no inverse of the requested shape."""


class WindowTooSmall(EbthError):
    """The stored window cannot support the requested computation."""


class WindowExhausted(EbthError):
    """Window budget ran out while iterating an order-by-order scheme."""


class UnluckyZero(EbthError):
    """A random draw produced a forbidden zero and retries ran out."""


class NotClosed(EbthError):
    """Attempt to integrate a 1-form whose exterior derivative is nonzero."""


class TruncationUnsupported(EbthError):
    """The requested truncation pattern is outside the supported sector."""


class ConfigError(EbthError):
    """Invalid run configuration."""
