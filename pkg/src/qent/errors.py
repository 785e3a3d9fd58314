"""Exception and warning types raised across the package."""


class QentError(Exception):
    """Base class for all package errors."""


class NotHermitian(QentError, ValueError):
    pass


class NoConvergence(QentError, ArithmeticError):
    pass


class NotPSD(QentError, ValueError):
    pass


class TraceNotOne(QentError, ValueError):
    pass


class ParamOutOfRange(QentError, ValueError):
    pass


class ZeroVector(QentError, ValueError):
    pass


class BlochOutOfBall(QentError, ValueError):
    pass


class StateFormatError(QentError, ValueError):
    """A state file is malformed; the message names the offending field."""


class NonUnitVector(QentError, ValueError):
    pass


class DegenerateCorrelation(QentError, ValueError):
    """The correlation matrix has no two nonzero singular directions to use."""


class NoSignChange(QentError, ValueError):
    pass


class NotFound(QentError, LookupError):
    """A search exhausted its budget.  ``searched`` holds the number of draws."""

    def __init__(self, message, searched=0):
        super().__init__(message)
        self.searched = searched


class OracleDisagreement(QentError, RuntimeError):
    """PPT and concurrence oracles disagree on a sample outside the boundary band."""


class NonMonotoneWarning(UserWarning):
    pass
