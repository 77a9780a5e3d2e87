"""Exception types shared across the package."""


class SnipminerError(Exception):
    """Base class for all package errors."""


class StreamFormatError(SnipminerError, ValueError):
    """A stream line could not be parsed; message names line and field."""


class OutOfOrderError(SnipminerError, ValueError):
    """Timestamps regressed where non-decreasing order is required."""


class IntervalError(SnipminerError, ValueError):
    """Timestamps violate the required interval ordering."""


class MissingLabelError(SnipminerError, ValueError):
    """The label view was asked to map an update without node labels."""


class InjectionError(SnipminerError, RuntimeError):
    """Anomaly injection could not satisfy its constraints."""
