"""Exception types raised across fareyspin.

Every error derives from :class:`FareySpinError` (itself a ``ValueError``) so
callers can catch the whole family at once; the integer-width guard is also an
``OverflowError``.
"""


class FareySpinError(ValueError):
    pass


class NotCoprime(FareySpinError):
    pass


class NonPositive(FareySpinError):
    pass


class BadDiscriminant(FareySpinError):
    pass


class BadTrace(FareySpinError):
    pass


class BadResidue(FareySpinError):
    pass


class SquareInput(FareySpinError):
    pass


class NotFundamental(FareySpinError):
    pass


class NoConvergence(FareySpinError):
    pass


class DegenerateSample(FareySpinError):
    pass


class BadBinning(FareySpinError):
    pass


class IntegerOverflow(FareySpinError, OverflowError):
    """Input outside the signed 128-bit range the counting paths guarantee."""
