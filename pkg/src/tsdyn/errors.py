"""Exception hierarchy for tsdyn."""

from __future__ import annotations


class TimeScaleError(ValueError):
    """Base class for every error raised by this package."""


class NonIncreasing(TimeScaleError):
    pass


class TooShort(TimeScaleError):
    pass


class ScaleTooShort(TooShort):
    pass


class IndexOutOfRange(TimeScaleError, IndexError):
    pass


class UnsupportedScale(TimeScaleError):
    pass


class AnchorNotOnScale(TimeScaleError):
    pass


class NotRegressive(TimeScaleError):
    """Raised when 1 + mu*lambda (or the regressivity polynomial) vanishes."""

    def __init__(self, index: int, value: complex, what: str = "1 + mu*lambda"):
        self.index = index
        self.value = value
        super().__init__(f"not regressive at grid index {index}: |{what}| = {abs(value):.3g}")


class DegenerateRoots(TimeScaleError):
    pass


class SingularBeta(TimeScaleError):
    pass


class DegreeTooSmall(TimeScaleError):
    pass


class InadmissibleProblem(TimeScaleError):
    def __init__(self, failures: list[str]):
        self.failures = list(failures)
        super().__init__("inadmissible problem: " + "; ".join(self.failures))
