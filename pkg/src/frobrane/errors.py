"""Exception hierarchy.

Every exception that certifies a failed algebraic property carries the worst
residual that was observed, so callers can report *how badly* it failed.
"""


class FrobraneError(Exception):
    def __init__(self, message, residual=None, witness=None):
        super().__init__(message)
        self.residual = residual
        self.witness = witness


# numcore
class ShapeMismatch(FrobraneError, ValueError):
    pass


class InvalidMetric(FrobraneError, ValueError):
    pass


class FactorizationFailure(FrobraneError):
    pass


# algebra
class NotAssociative(FrobraneError):
    pass


class NoUnit(FrobraneError):
    pass


class BadInvolution(FrobraneError):
    pass


class BadTrace(FrobraneError):
    pass


class NotSimple(FrobraneError):
    pass


class ExtractionFailed(FrobraneError):
    pass


class NotSymmetric(FrobraneError):
    pass


class NotInvariant(FrobraneError):
    pass


class Degenerate(FrobraneError):
    pass


# bimodule
class NotRepresentation(FrobraneError):
    pass


class NotUnital(FrobraneError):
    pass


class ActionsDontCommute(FrobraneError):
    pass


class MiddleMismatch(FrobraneError):
    pass


class NotSimpleAlgebras(FrobraneError):
    pass


# lbg / kfrob / correspondence
class NotIso(FrobraneError):
    pass


class AxiomFailure(FrobraneError):
    """An object handed to a construction failed its axiom suite."""

    def __init__(self, message, report=None):
        worst = None
        if report is not None:
            failing = report.failures()
            worst = max((c.residual for c in failing), default=None)
        super().__init__(message, residual=worst)
        self.report = report


class NotHermitian(FrobraneError):
    pass


class NotScalarBulk(FrobraneError):
    pass


class PositivityRequired(FrobraneError):
    pass


class NoIntertwiner(FrobraneError):
    pass


class InternalInconsistency(FrobraneError):
    pass
