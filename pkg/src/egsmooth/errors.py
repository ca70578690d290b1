"""Exception types shared across the package."""


class EgsmoothError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(EgsmoothError):
    """A file did not conform to its documented on-disk format.

    ``line`` is 1-based when the format is line-oriented, else None.
    """

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        if prefix:
            message = f"{prefix}: {message}"
        super().__init__(message)


class PredicateParseError(EgsmoothError):
    """A relation string could not be parsed into a typed predicate."""


class SignatureMismatchError(EgsmoothError):
    """Two predicates that must share a type signature do not."""


class MetricsError(EgsmoothError):
    """A metric was requested on inputs it is undefined for."""
