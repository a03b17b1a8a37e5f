"""Exception hierarchy shared by the engine, the CLI and the HTTP service."""


class HFError(Exception):
    """Base class; ``name`` is what reports and exit messages show."""

    @property
    def name(self) -> str:
        return type(self).__name__


class ParseError(HFError):
    pass


class NonMonomialPivot(HFError):
    pass


class InvalidComplex(HFError):
    pass


class NoTower(HFError):
    pass


class ZeroOnTower(HFError):
    pass


class NotSouthWest(HFError):
    pass


class NotNested(HFError):
    pass


class FlipUndefined(HFError):
    pass


class BadSteps(HFError):
    pass


class NotLarge(HFError):
    pass


class WindowUnstable(HFError):
    pass


class ZeroSurgery(HFError):
    pass


class InvariantViolation(HFError):
    pass


class MismatchWithCone(HFError):
    pass


class TruncationUnstable(HFError):
    pass


class TruncationTooLow(HFError):
    pass


class DegenerateFraming(HFError):
    pass


class NotComparable(HFError):
    pass
