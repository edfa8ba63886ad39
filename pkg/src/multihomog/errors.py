"""Exception hierarchy shared by all engine modules."""


class MultihomogError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(MultihomogError, ValueError):
    pass


class InvalidChangeError(MultihomogError, ValueError):
    pass


class NotAUnitError(MultihomogError, ValueError):
    pass


class NotDivisibleError(MultihomogError, ArithmeticError):
    pass


class CommutationError(MultihomogError, ValueError):
    pass


class UnsupportedSpectrumError(MultihomogError):
    """A matrix that must be diagonalized over Q has irrational or defective spectrum."""


class InvalidGermError(MultihomogError, ValueError):
    pass


class StabilizationError(MultihomogError):
    pass


class InvalidStateError(MultihomogError):
    pass


class ObstructionError(MultihomogError):
    """Normalization could not eliminate an off-weight term.

    ``dump`` carries the intermediate state for diagnosis.
    """

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump or {}


class FactorizationError(MultihomogError, ValueError):
    pass


class NonEquivariantFactorError(MultihomogError, ValueError):
    pass


class RepeatedFactorError(FactorizationError):
    pass


class RefusedInputError(MultihomogError):
    """Input germ is outside the scope of the analysis (smooth, product with a smooth factor, ...)."""


class PolynomialSyntaxError(MultihomogError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
