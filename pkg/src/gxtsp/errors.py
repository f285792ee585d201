class ContractViolation(ValueError):
    """Raised when an argument breaks an operation's precondition."""


class TSPLIBParseError(ValueError):
    """Malformed or unsupported TSPLIB input."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
