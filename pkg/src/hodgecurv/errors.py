"""Exception types shared across the package."""


class HodgeCurvError(Exception):
    """Base class for all package errors."""


class DomainError(HodgeCurvError, ValueError):
    """A base point lies outside the chart domain."""


class SingularEval(HodgeCurvError, ZeroDivisionError):
    """An expression hit a zero denominator (or a non-finite value)."""


class ParseError(HodgeCurvError, ValueError):
    """Malformed expression text.

    Carries the 1-based ``line`` and ``column`` of the offending token and the
    set of tokens that would have been accepted there.
    """

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class SingularMetric(HodgeCurvError, ValueError):
    """A Hermitian form failed the positive-definiteness test."""


class DegenerateGram(HodgeCurvError, ValueError):
    """Gram matrix too ill-conditioned: the spanning set is not independent."""

    def __init__(self, message, condition=float("inf")):
        self.condition = condition
        super().__init__(f"{message} (condition number {condition:.3e})")


class NotNilpotent(HodgeCurvError, ValueError):
    """The endomorphism has no vanishing power within the rank bound."""


class NotRepresentable(HodgeCurvError, ValueError):
    """No grading that is both h-orthogonal and strictly graded was found."""


class NotFlat(HodgeCurvError, ValueError):
    """The flatness residual exceeds tolerance where flatness is required."""


class ValidationError(HodgeCurvError, ValueError):
    """A bundle definition violates structural requirements.

    ``problems`` lists every violation found, each naming its location.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UnknownFixture(HodgeCurvError, KeyError):
    """Requested fixture name is not in the catalog."""

    def __str__(self):
        return f"unknown fixture: {self.args[0]!r}"
