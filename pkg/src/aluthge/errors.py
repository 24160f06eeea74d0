"""Exception hierarchy.

Errors are split into input problems (bad files, bad shapes, non-commuting
input) and numerical failures (convergence, certification). The CLI maps the
two families to distinct exit codes.
"""


class AluthgeError(Exception):
    """Base class for every error raised by this package."""


class InputError(AluthgeError):
    pass


class NumericalFailure(AluthgeError):
    pass


class DimensionMismatch(InputError):
    pass


class NotSquare(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotPsd(InputError):
    pass


class InvalidSpec(InputError):
    pass


class KOutOfRange(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, offset=None):
        where = ""
        if line is not None:
            where = f" (line {line}, offset {offset})"
        super().__init__(message + where)
        self.line = line
        self.offset = offset


class NotCommuting(InputError):
    def __init__(self, defect, bound, message=None):
        super().__init__(
            message or f"tuple does not commute: defect {defect:.3e} exceeds bound {bound:.3e}"
        )
        self.defect = defect
        self.bound = bound


class TransformNotCommuting(NotCommuting, NumericalFailure):
    """The transformed tuple lost commutativity; an accuracy problem upstream."""


class NotCrissCross(InputError):
    pass


class ProductNotCommuting(InputError):
    pass


class ConvergenceFailure(NumericalFailure):
    pass


class TriangularizationFailure(NumericalFailure):
    pass


class CertificationFailure(NumericalFailure):
    pass


class IndexAnomalous(NumericalFailure):
    pass
