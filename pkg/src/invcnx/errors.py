"""Exception hierarchy shared by all modules."""


class InvcnxError(Exception):
    """Base class for every error raised by this package."""


class ParseError(InvcnxError, ValueError):
    pass


class ParamSpaceError(InvcnxError, ValueError):
    """Mixing expressions from different parameter spaces, or an undeclared parameter."""


class ClosureError(InvcnxError, ValueError):
    """An operation would leave the closed expression class."""


class EvalSingular(InvcnxError, ZeroDivisionError):
    """A negative-power atom vanishes at the evaluation point."""


class ParamSingular(InvcnxError, ZeroDivisionError):
    """A parameter denominator vanishes at the given parameter values."""


class JetSingular(InvcnxError, ValueError):
    pass


class OracleSingular(InvcnxError, ValueError):
    pass


class ProfileUnsupported(InvcnxError, ValueError):
    pass


class ParamDegenerate(InvcnxError, ValueError):
    """A pivot's vanishing locus meets the declared parameter constraints."""


class NotTransitive(InvcnxError, ValueError):
    pass


class UnknownCase(InvcnxError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConstraintViolated(InvcnxError, ValueError):
    pass
