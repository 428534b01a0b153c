"""Exception hierarchy shared across holocurve."""


class HolocurveError(Exception):
    """Base class for all library errors."""


class ParameterError(HolocurveError, ValueError):
    """An argument is outside its admissible range."""


class DomainError(HolocurveError):
    """A point (or a curve's graph) lies outside the domain of a field.

    ``t`` and ``distance`` locate the first offending sample when known;
    ``distance`` is the norm distance from the domain ball's center.
    """

    def __init__(self, message, t=None, distance=None):
        super().__init__(message)
        self.t = t
        self.distance = distance


class DegenerateDomainError(DomainError):
    """The safety radius of a curve is not positive."""


class EvaluationError(HolocurveError):
    """A map returned a non-finite value at a quadrature node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ConvergenceError(HolocurveError):
    """A fixed-point iteration did not reach its tolerance."""

    def __init__(self, message, contraction=None, iterations=None):
        super().__init__(message)
        self.contraction = contraction
        self.iterations = iterations


class FieldSyntaxError(HolocurveError, ValueError):
    """Invalid field expression source; ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
