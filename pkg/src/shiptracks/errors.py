"""Exception types shared across the simulator."""

from __future__ import annotations


class ShipTrackError(Exception):
    """Base class for all simulator errors."""


class ConfigError(ShipTrackError):
    """Raised when a configuration violates one or more invariants.

    All violations found are collected in ``violations`` so callers can
    report them together.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{v.code}: {v.message}" for v in self.violations)
        super().__init__(msg or "invalid configuration")

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


class InputFileError(ShipTrackError):
    """A config, wind, boat or image file could not be read or parsed."""


class OutOfDomain(ShipTrackError, ValueError):
    pass


class NegativeDuration(ShipTrackError, ValueError):
    pass


class NonPositiveMean(ShipTrackError, ValueError):
    pass


class NonPositiveLifetime(ShipTrackError, ValueError):
    pass


class NegativeAge(ShipTrackError, ValueError):
    pass


class UnknownBoat(ShipTrackError, KeyError):
    pass


class EmptyPath(ShipTrackError, ValueError):
    pass


class AllZeroVideo(ShipTrackError):
    """No pixel in any frame carries positive intensity."""


class MissingLog(ShipTrackError, FileNotFoundError):
    pass
