"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """An argument violates a documented precondition."""


class NumericFailure(ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""


class IngestionError(ValueError):
    """A dataset file could not be parsed.

    Attributes:
        row: 1-based line number in the file, if known.
        column: 0-based column index, if known.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
