"""Exception types shared across the package."""


class UrndistError(Exception):
    """Base class for all package-specific errors."""


class ParseError(UrndistError):
    """A row or header of an input file could not be parsed.

    Carries the 1-based line number of the offending input line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(UrndistError):
    """A parsed value violates a data invariant (bad count, date, category)."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if key is not None:
            prefix.append(f"record {key!r}")
        if prefix:
            message = f"{', '.join(prefix)}: {message}"
        super().__init__(message)


class ConfigError(UrndistError):
    """A run configuration value is missing, malformed, or inconsistent."""


class OutsideWindowError(UrndistError):
    """A record's date range lies wholly outside the study window."""

    def __init__(self, key, date_start, date_end, window):
        self.key = key
        super().__init__(
            f"record {key!r} dated {date_start}..{date_end} lies outside "
            f"the study window {window.start_year}..{window.end_year}"
        )


class EmptyIntervalError(UrndistError):
    """Posterior mean requested for an interval with no mass and a zero prior.

    The caller decides whether this is fatal; the permutation engine skips
    the affected sample instead of aborting.
    """

    def __init__(self, scope_id, interval):
        self.scope_id = scope_id
        self.interval = interval
        super().__init__(
            f"scope {scope_id!r} has no mass in interval {interval} and the "
            "prior concentration is 0; posterior mean is undefined"
        )


class InfiniteDivergenceError(UrndistError):
    """KL divergence is infinite: q has a zero component where p does not."""


class InsufficientDataError(UrndistError):
    """Too few samples to carry out a density estimate."""
