"""Exception hierarchy shared by every module."""


class EikonalError(Exception):
    """Base class for numerical failures (CLI exit code 3)."""


class DegenerateGradient(EikonalError):
    """|Dg(y0)| is below the gradient-zero threshold."""


class NotApplicable(DegenerateGradient):
    """The requested method needs a nonzero gradient direction."""


class InvalidDirection(EikonalError):
    pass


class OutOfBounds(EikonalError):
    """A query (or its ball of radius t) leaves the field's box of validity."""


class NotC2(EikonalError):
    """Second derivatives were requested from a field tagged C1."""


class SingularJacobian(EikonalError):
    """X_y(y0, t) is singular (t is a conjugate time)."""


class ConfigError(Exception):
    """Invalid run configuration (CLI exit code 2)."""
