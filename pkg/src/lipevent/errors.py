"""Exception types raised across the package."""


class LipEventError(ValueError):
    """Base class for all input and configuration errors."""


class DegenerateConfiguration(LipEventError):
    pass


class InvalidWindow(LipEventError):
    pass


class CountMismatch(LipEventError):
    pass


class LandmarkAtCenter(LipEventError):
    pass


class EmptySide(LipEventError):
    pass


class SequenceTooShort(LipEventError):
    pass


class InvalidConfig(LipEventError):
    pass


class LengthMismatch(LipEventError):
    pass


class MissingEvent(LipEventError):
    pass


class EmptyInput(LipEventError):
    pass


class UnmatchedSequence(LipEventError):
    pass


class FormatError(LipEventError):
    """Malformed landmark or truth file. ``row`` is the 1-based line number when known."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
