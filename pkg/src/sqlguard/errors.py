"""Exception types shared across the engine."""


class SqlGuardError(Exception):
    """Base class for all sqlguard errors."""


class InvalidEncodingError(SqlGuardError):
    """Input text was not valid UTF-8."""


class EmptyPatternError(SqlGuardError):
    """A pattern was empty, or normalized down to zero bytes."""


class StoreFileError(SqlGuardError):
    """Parse failure in a persisted file; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class MalformedLineError(StoreFileError):
    """A line had a bad escape, bad field count, or an unparseable field."""


class DuplicateTextError(StoreFileError):
    """Two pattern lines carried the same normalized text."""


class NonMonotonicIdError(StoreFileError):
    """Pattern ids did not strictly increase in file order."""


class UnknownAlarmError(SqlGuardError):
    """No alarm with the requested id exists."""


class AlreadyDecidedError(SqlGuardError):
    """The alarm was already confirmed or dismissed."""
