"""Exception types shared across the package.

Every error the CLI maps to an exit code lives here so the front end can
catch one base class.
"""


class AffdimError(Exception):
    """Base class for all package errors."""


class SingularMatrix(AffdimError):
    """Matrix determinant below the singularity floor."""


class NegativeExponent(AffdimError):
    """Singular value function called with s < 0."""


class NonConvexPolygon(AffdimError):
    """Separation checks require a convex polygon."""


class ParseError(AffdimError):
    """Config file rejected; message carries line/field diagnostics."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BadSymbol(AffdimError):
    """Word contains a symbol outside 1..N."""


class NotTriangular(AffdimError):
    """Operation requires all linear parts lower triangular."""


class NotCertified(AffdimError):
    """Direction-field operation on a system without certified splitting."""


class PrefixTooShort(AffdimError):
    """Word too short for the requested direction tolerance."""


class EnumerationTooLarge(AffdimError):
    """N^n exceeds the word-enumeration cap."""


class NoSignChange(AffdimError):
    """Pressure has no root in the search bracket; signals bad input."""


class NoDomination(AffdimError):
    """Triangular root formulas need |a_i|>|c_i| for all i or < for all i."""


class TooFewPoints(AffdimError):
    """Empirical estimator called with too small a sample."""


class BadExponents(AffdimError):
    """Exponent triple violates 0 < chi_s <= chi_ss or dim_T outside [0,1]."""


class UnsupportedDepth(AffdimError):
    """Cylinder rendering depth would enumerate too many words."""
