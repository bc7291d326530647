"""Exception types and the unsupported-result marker."""
from __future__ import annotations


class TangleLabError(Exception):
    """Base class for all library errors."""


class InvalidStateError(TangleLabError):
    """Vector or matrix does not satisfy the state invariants."""


class InvalidSubsetError(TangleLabError):
    """Qubit subset is empty, unsorted, duplicated, or out of range."""


class UnknownStateError(TangleLabError):
    """Requested named state is not in the registry."""


class DegenerateFamilyError(TangleLabError):
    """Family parameters degenerate (e.g. a vanishing product a*b)."""


class SingularFamilyError(TangleLabError):
    """Family parametrization blows up at the requested point."""


class BracketError(TangleLabError):
    """Scalar search bracket does not contain the requested feature."""


class UnsupportedExponentError(TangleLabError):
    """Roof scenario invoked with a power factor it has no solution for."""


class MeasureEvaluationError(TangleLabError):
    """A measure failed while sweeping a state family grid."""


class MonogamyViolationError(TangleLabError):
    """A monogamy slack came out negative beyond numerical tolerance."""


class _Unsupported:
    """Singleton marker for quantities the library declines to evaluate."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNSUPPORTED"

    def __bool__(self) -> bool:
        return False


UNSUPPORTED = _Unsupported()
