"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where a model is defined."""


class ParseError(ValueError):
    """A data or config file is malformed.

    ``line`` is the 1-based line number of the offending line, or None when
    the problem is not tied to a single line (e.g. a missing header).
    """

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}"
        if line is not None:
            where += f"{':' if where else 'line '}{line}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigError(ParseError):
    """Unknown key or bad value in a ``section.key = value`` config file."""
