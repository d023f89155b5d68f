"""Exception hierarchy shared by all dioph modules."""


class DiophError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DiophError, ValueError):
    pass


class PrecisionExhausted(DiophError):
    """A real-valued input is too coarse to decide the requested quantity."""


class ToleranceNotMet(DiophError):
    """A numerical procedure could not certify the requested tolerance."""


class EnumerationTooLarge(DiophError):
    pass


class MassTooSmall(DiophError):
    """The good-block set carries too little product mass."""


class InfeasibleSchedule(DiophError):
    pass


class InadmissibleWord(DiophError, ValueError):
    pass


class WordTooShort(DiophError, ValueError):
    pass


class BelowFirstScale(DiophError, ValueError):
    pass


class ThresholdExceeded(DiophError, ValueError):
    """tau is at or above the admissible threshold for the scale machinery."""


class ConstraintViolated(DiophError):
    pass


class BoundViolated(DiophError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class Degenerate(DiophError):
    """An experiment has too little divergence (or data) to be meaningful."""


class AllBelowNoise(DiophError):
    pass


class ConfigInvalid(DiophError, ValueError):
    pass


class CacheCorrupt(DiophError):
    pass
