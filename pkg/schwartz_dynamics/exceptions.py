class SchwartzDynamicsError(Exception):
    pass


class ExpressionSyntaxError(SchwartzDynamicsError):
    """
    Raised when symbol text does not match the expression grammar. `position` is the
    1-based column of the offending character.
    """
    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} at column {position}")


class DomainError(SchwartzDynamicsError):
    def __init__(self, message, x=None):
        self.x = x
        if x is not None:
            message = f"{message} (at x={x!r})"
        super().__init__(message)


class MagnitudeOverflow(DomainError):
    pass


class PreconditionError(SchwartzDynamicsError):
    """
    A mathematical hypothesis required by an operation does not hold for its input.
    `hypothesis` names the hypothesis so that callers (and the command line) can report it.
    """
    def __init__(self, message, hypothesis):
        self.hypothesis = hypothesis
        super().__init__(f"{message} [hypothesis: {hypothesis}]")


class InvalidGeometry(ValueError):
    pass
