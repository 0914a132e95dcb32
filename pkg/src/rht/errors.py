"""Exception hierarchy shared by all modules."""


class RhtError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(RhtError):
    pass


class DuplicateName(ValidationError):
    pass


class NonPositiveDegree(ValidationError):
    pass


class ContextMismatch(RhtError):
    pass


class DimensionMismatch(RhtError):
    pass


class NotASubspace(RhtError):
    pass


class NoSolution(RhtError):
    pass


class DegreeViolation(ValidationError):
    pass


class DSquaredNonzero(ValidationError):
    def __init__(self, generator, residual):
        super().__init__(f"d^2({generator}) = {residual} != 0")
        self.generator = generator
        self.residual = residual


class DifferentialDoesNotDescend(ValidationError):
    pass


class AssociativityContradiction(ValidationError):
    pass


class PairingDegenerate(UserWarning):
    """Warning: a Poincare pairing matrix is singular."""


class NotClosed(RhtError):
    pass


class DegreeOverflow(RhtError):
    pass


class NotSimplyConnected(RhtError):
    pass


class TargetNotComputable(RhtError):
    pass


class SplittingInconsistent(RhtError):
    pass


class ModelTooShallow(RhtError):
    pass


class ProductsNotExact(RhtError):
    pass


class ParseError(RhtError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
