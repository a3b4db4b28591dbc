"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class TGAError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(TGAError, ValueError):
    """Input does not match the expected shape (malformed document or object)."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionError(TGAError, ValueError):
    """Input is well formed but violates an operation's precondition."""


class UnsupportedError(PreconditionError):
    """The requested operation is outside the tier this package computes on."""
