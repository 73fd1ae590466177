"""Exceptions used in ell_calogero."""


class FailedInitialization(Exception):
    """Run configuration could not be built (usage error)."""


class InvalidLabelError(Exception):
    """Malformed quantum numbers, partition or rank."""


class PoleError(Exception):
    """A rational formula hit a vanishing denominator."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class SeriesTruncationError(Exception):
    """Weierstrass series cannot be evaluated with a usable tail bound."""


class TruncationError(Exception):
    """Operator bandwidth does not fit in the basis truncation."""


class ConvergenceError(Exception):
    """Numeric non-convergence (eigensolver, quadrature, lattice sum, truncation monitor)."""


class InternalError(Exception):
    """Unexpected/inconsistent state."""


class VerificationFailure(Exception):
    """One or more gating verify checks failed."""


class OutputFormatError(Exception):
    """Illegal or unsupported output format."""
