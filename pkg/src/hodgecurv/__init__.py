"""Numerical certification of curvature properties of Hodge metrics of Higgs bundles."""

__version__ = "0.1.0"

from .errors import (DegenerateGram, DomainError, HodgeCurvError, NotFlat,  # noqa: E402
                     NotNilpotent, NotRepresentable, ParseError, SingularEval,
                     SingularMetric, UnknownFixture, ValidationError)
from .expr import conj, coord, evaluate, to_text, wirtinger_d  # noqa: E402
from .parser import parse_expr  # noqa: E402
from .bundle import HiggsBundle  # noqa: E402

__all__ = [
    "__version__", "HiggsBundle", "parse_expr", "evaluate", "wirtinger_d", "coord",
    "conj", "to_text", "HodgeCurvError", "DomainError", "SingularEval", "ParseError",
    "SingularMetric", "DegenerateGram", "NotNilpotent", "NotRepresentable", "NotFlat",
    "ValidationError", "UnknownFixture",
]
