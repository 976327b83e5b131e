class QuboAlignException(Exception):
    pass


class InputException(QuboAlignException):
    """Bad user input. The CLI exits with code 1."""


class InvariantViolationException(QuboAlignException):
    """An internal consistency check failed. The CLI exits with code 2."""


class InvalidConfigException(InputException):
    pass


class PointSetFormatException(InputException):
    pass


class InvalidLinkDegreeException(InputException):
    pass


class InvalidNoiseRatioException(InputException):
    pass


class LengthMismatchException(InputException):
    pass


class CardinalityMismatchException(InputException):
    pass


class NotCenteredException(InputException):
    pass


class DimensionMismatchException(InputException):
    pass


class TooManyBitsException(InputException):
    pass


class TooManyQubitsException(InputException):
    pass


class InvalidScheduleException(InputException):
    pass


class ClampViolatedException(InputException):
    pass


class ZeroReferenceException(InputException):
    pass


class DegenerateGapException(QuboAlignException):
    def __init__(self, s: float, gap: float):
        super().__init__(f"Ground state is degenerate at s={s:.6g} (gap={gap:.3g})")
        self.s = s
        self.gap = gap


class IsingFormatException(InputException):
    pass
