"""Exception hierarchy shared by every module."""


class ZvlError(Exception):
    """Base class for all errors raised by the package."""


class InvalidParameter(ZvlError, ValueError):
    pass


class NonzeroMean(ZvlError, ValueError):
    pass


class ShapeMismatch(ZvlError, ValueError):
    pass


class UnstableStep(ZvlError, RuntimeError):
    def __init__(self, t: float, message: str = "") -> None:
        self.t = t
        super().__init__(message or f"unstable step at t={t:.6g}")


class IncompatibleSpec(ZvlError, TypeError):
    pass


class NegativeWeight(ZvlError, ValueError):
    pass


class TooFewRecords(ZvlError, ValueError):
    pass


class CoercivityViolation(ZvlError, AssertionError):
    def __init__(self, sample_id: int, zeta, message: str) -> None:
        self.sample_id = sample_id
        self.zeta = zeta
        super().__init__(message)


class RegionOutOfBox(ZvlError, RuntimeError):
    pass


class ParseError(ZvlError, ValueError):
    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(ZvlError, ValueError):
    def __init__(self, field: str, reason: str) -> None:
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")
