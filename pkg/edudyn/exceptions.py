"""Errors raised by the enrolment dynamics package.

Validation failures subclass `ValueError` and numerical failures subclass
`ArithmeticError`, so callers can catch either the package base class
`EdudynError` or the builtin family.
"""

from __future__ import annotations


class EdudynError(Exception):
    """Base class for every error raised by edudyn."""


class ParameterError(EdudynError, ValueError):
    """A structural parameter violates its bound.

    Attributes:
        field: Name of the offending parameter.
    """

    def __init__(self, field: str, message: str) -> None:
        """Initialize with the offending field name and a message."""
        super().__init__(message)
        self.field = field


class DomainError(EdudynError, ValueError):
    """An enrolment level or follower share lies outside its domain."""


class DegenerateWeights(EdudynError, ArithmeticError):  # noqa: N818
    """Both preference weights of a type vanish so its share is 0/0."""


class KinkProximity(EdudynError, ArithmeticError):  # noqa: N818
    """A derivative was requested too close to the premium kink E = pi_bar / kappa."""


class ShareAtBoundary(EdudynError, ArithmeticError):  # noqa: N818
    """An education share sits at 0 or 1 where the utility logs diverge."""


class DerivativeMismatch(EdudynError, ArithmeticError):  # noqa: N818
    """Two algebraically equivalent derivative forms disagree numerically."""


class UnimodalityNotCertified(EdudynError, ArithmeticError):  # noqa: N818
    """The map is not certified unimodal, so no absorbing interval is built."""


class InvarianceViolation(EdudynError, ArithmeticError):  # noqa: N818
    """A sampled invariance check of an absorbing interval failed."""


class NotStable(EdudynError, ArithmeticError):  # noqa: N818
    """The fixed point is not locally stable."""


class NotAFixedPoint(EdudynError, ValueError):  # noqa: N818
    """The supplied state does not satisfy the fixed-point equations."""


class GStarNotBelowOne(EdudynError, ArithmeticError):  # noqa: N818
    """|gamma_E| at the fixed point is not below one, no mu threshold exists."""


class HStarZero(EdudynError, ArithmeticError):  # noqa: N818
    """The utility-slope gap vanishes, so every mu keeps the fixed point stable."""


class PropositionViolation(EdudynError, ArithmeticError):  # noqa: N818
    """A computed quantity contradicts a proven sign or bound."""


class ConfigError(EdudynError, ValueError):
    """A run configuration cannot be parsed or validated.

    Attributes:
        source: File name or origin of the offending entry.
        line: 1-based line number, when known.
        key: Dotted configuration key, when known.
    """

    def __init__(
        self,
        message: str,
        *,
        source: str | None = None,
        line: int | None = None,
        key: str | None = None,
    ) -> None:
        """Initialize with a message and optional location information."""
        location = source or "<config>"
        if line is not None:
            location = f"{location}:{line}"
        if key is not None:
            location = f"{location}: {key}"
        super().__init__(f"{location}: {message}")
        self.source = source
        self.line = line
        self.key = key
