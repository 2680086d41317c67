"""Exception hierarchy shared by every layer of the package."""


class CrossPlatError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class UsageError(CrossPlatError, ValueError):
    """Bad arguments: wrong shapes, out-of-range parameters, misaligned data."""

    exit_code = 2


class TransportError(CrossPlatError):
    """A platform could not be reached or stopped answering mid-run."""

    exit_code = 3


class NumericalIntegrityError(CrossPlatError, ArithmeticError):
    """A numerical invariant (normalisation, hermiticity, realness) was violated."""

    exit_code = 4


class DegenerateDataError(NumericalIntegrityError):
    """Estimated quantities are too small to form a ratio (e.g. far too few shots)."""
