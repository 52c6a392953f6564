"""Exception hierarchy for certcub."""


class CertcubError(Exception):
    """Base class for every error raised by this package."""


class InvalidRectangle(CertcubError, ValueError):
    pass


class ParamOutOfRange(CertcubError, ValueError):
    """A parameter violates one of the half-interval constraints.

    ``constraint`` names the violated inequality, e.g. ``"alpha1 <= (a+b)/2"``.
    """

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class OutOfDomain(CertcubError, ValueError):
    pass


class QuadratureFailure(CertcubError, ArithmeticError):
    pass


class UnsupportedOrder(CertcubError, ValueError):
    pass


class MissingMixedPartial(CertcubError, ValueError):
    pass


class StencilOutOfDomain(CertcubError, ValueError):
    pass


class OracleNonConvergent(CertcubError, ArithmeticError):
    pass


class ParseError(CertcubError, ValueError):
    """Malformed expression text.

    Carries the byte ``offset`` where parsing stopped and the set of tokens
    that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        full = f"{message} at offset {offset}"
        if exp:
            full += f" (expected one of: {exp})"
        super().__init__(full)


class EvalDomainError(CertcubError, ArithmeticError):
    pass


class UnsupportedDerivative(CertcubError, ValueError):
    pass


class EstimationFailure(CertcubError, ArithmeticError):
    pass
