"""Exception hierarchy shared by all modules."""


class AnnihilantError(Exception):
    pass


class ParseError(AnnihilantError, ValueError):
    """Malformed expression text; ``position`` is a 0-based column or None."""

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnsupportedError(AnnihilantError):
    """The inhomogeneity lies outside what the solvers can handle."""


class OutOfClassError(ParseError, UnsupportedError):
    """Text is well formed but denotes a function outside the supported class."""


class DimensionError(AnnihilantError, ValueError):
    pass


class UnboundError(AnnihilantError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unbound symbol"


class ConditionError(AnnihilantError):
    """A theorem precondition does not hold; ``residual`` carries the witness."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class VerificationError(AnnihilantError):
    """A computed result failed its own exact check (internal error)."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
