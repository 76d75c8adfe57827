"""Exception hierarchy.

``DataError`` subclasses map to CLI exit code 1; anything else bubbling out
of a command is a usage/programming error.
"""


class BessUseError(Exception):
    """Base class for all package errors."""


class DataError(BessUseError):
    """Problem with input data (files, series, coverage)."""


class MalformedRow(DataError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class DuplicateTimestamp(DataError):
    def __init__(self, timestamp):
        self.timestamp = timestamp
        super().__init__(f"duplicate timestamp {timestamp.isoformat()}")


class NonMonotonicTimestamp(DataError):
    def __init__(self, timestamp):
        self.timestamp = timestamp
        super().__init__(f"timestamp {timestamp.isoformat()} is not increasing")


class CurrencyMismatch(DataError):
    pass


class WrongKind(DataError):
    pass


class IncompleteDay(DataError):
    pass


class MissingData(DataError):
    def __init__(self, zone: str, kind: str):
        self.zone = zone
        self.kind = kind
        super().__init__(f"no {kind} data for zone {zone}")


class UnpricedEnergyLeg(DataError):
    pass


class NonPositiveCycleLife(BessUseError, ValueError):
    pass


class ZeroTotalPeriods(BessUseError, ValueError):
    pass


class OutOfRange(BessUseError, ValueError):
    pass


class ServiceNotRemunerated(BessUseError):
    """FCR requested for a zone whose primary reserve is mandatory and unpaid."""
