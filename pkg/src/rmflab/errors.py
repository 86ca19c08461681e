"""Exception types shared across the package.

The CLI maps these onto exit codes: DomainError (and subclasses) exit with 3,
I/O problems with 4, argparse usage errors with 2.
"""


class DomainError(ValueError):
    """A precondition on an operation's arguments was violated."""


class MissingSignError(DomainError):
    """An explicit sign assignment was queried at a prime it does not cover."""


class ResourceError(RuntimeError):
    """An allocation exceeded what the host can provide."""

    def __init__(self, message: str, requested_bytes: int | None = None):
        super().__init__(message)
        self.requested_bytes = requested_bytes
