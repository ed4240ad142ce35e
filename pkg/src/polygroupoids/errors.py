"""Exception hierarchy shared by every module."""


class PolygroupoidError(Exception):
    pass


class StructuralError(PolygroupoidError):
    """Malformed input: wrong levels, repeated vertices, mismatched lengths."""


class CapacityError(PolygroupoidError):
    """An exhaustive computation would exceed its configured bound."""

    def __init__(self, message, count=None, bound=None):
        super().__init__(message)
        self.count = count
        self.bound = bound


class UnfillableError(PolygroupoidError):
    """A horn or face that should be fillable has no filler."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(PolygroupoidError):
    pass


class ParseError(PolygroupoidError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
