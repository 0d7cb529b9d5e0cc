"""Exception hierarchy.  CLI exit codes hang off the class."""


class QCoverError(Exception):
    exit_code = 2


class FieldError(QCoverError, ValueError):
    pass


class GeometryError(QCoverError, ValueError):
    """Ambient mismatch, wrong subspace dimension and similar misuse."""


class ResourceLimitError(QCoverError):
    exit_code = 3


class SearchError(QCoverError):
    exit_code = 4


class SearchBudgetExceeded(SearchError):
    def __init__(self, message: str, stats: dict | None = None):
        super().__init__(message)
        self.stats = dict(stats or {})


class SearchUnsolvable(SearchError):
    pass


class ConstructionError(QCoverError):
    """A construction produced something its own counting argument forbids."""

    exit_code = 4


class FormatError(QCoverError, ValueError):
    exit_code = 2
