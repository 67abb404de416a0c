"""Exception hierarchy shared by the library and the command line front-end."""


class SphereSpecError(Exception):
    """Base class for all library errors."""


class DomainError(SphereSpecError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(SphereSpecError, ArithmeticError):
    """An iterative numerical method failed to converge."""


class ParseError(SphereSpecError, ValueError):
    """A textual description could not be parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, text, position):
        self.text = text
        self.position = position
        super().__init__(message)

    def annotated(self):
        return f"{self.args[0]} (at column {self.position + 1})\n  {self.text}\n  {' ' * self.position}^"


class KernelParseError(ParseError):
    """A kernel string does not follow ``name(key=value,...)``."""
