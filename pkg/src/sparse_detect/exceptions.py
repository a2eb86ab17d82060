"""Exception types raised across the package."""


class InvalidConfigurationError(ValueError):
    """Parameters are inconsistent or outside the admissible range."""


class UnsupportedConfigurationError(ValueError):
    """The request is well formed but the operation does not support it
    (e.g. exact enumeration beyond its budget, unequal replicate counts)."""


class DesignFormatError(ValueError):
    """A design file could not be parsed.

    ``line`` is the 1-based line number of the offending input, when known.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class DegenerateStatisticError(ValueError):
    """Every candidate term of a statistic has a zero null variance."""
