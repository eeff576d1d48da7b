"""Exception types shared by all modules."""


class FlatsingError(ValueError):
    """A mathematical precondition failed (degenerate input, bad valuation, ...)."""


class SchemaError(ValueError):
    """Input data does not match the expected JSON layout."""

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path
