"""Exception types shared across modules."""


class DomainError(ValueError):
    """A parameter lies outside the admissible domain."""


class DegenerateSeries(ValueError):
    """The series has zero sample variance (or an equivalent degeneracy)."""


class QuadratureError(ArithmeticError):
    """Successive quadrature resolutions disagree beyond tolerance."""


class EigenConvergenceError(ArithmeticError):
    """The Jacobi sweep limit was hit before the off-diagonal norm vanished."""


class LevinsonBreakdown(ArithmeticError):
    """Durbin-Levinson met a nonpositive prediction variance."""


class BracketError(ArithmeticError):
    """Root bracket does not straddle the target probability."""
