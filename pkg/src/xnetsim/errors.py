"""Exception types shared across the package."""


class XnetsimError(Exception):
    """Base class for all package-specific errors."""


class SingularMatrix(XnetsimError):
    """A pivot fell below the relative threshold during inversion."""


class NotHermitian(XnetsimError):
    """Input to a Hermitian eigensolver was not Hermitian at tolerance."""


class NotUnitary(XnetsimError):
    """A matrix required to be unitary failed the check."""


class DimensionMismatch(XnetsimError):
    """Operand shapes are inconsistent with the operation's contract."""


class UnsupportedSize(XnetsimError):
    """Requested constellation, code name or size is not implemented."""


class MissingCcSpec(XnetsimError):
    """Operation needs a column-cancellation spec but the code has none."""


class EigMultiplicityViolation(XnetsimError):
    """Replication matrix has an eigenvalue cluster larger than floor(M/2)."""


class CodebookTooLarge(XnetsimError):
    """Exhaustive enumeration would exceed the configured cap."""


class RankDeficient(XnetsimError):
    """Effective channel matrix is rank deficient; the trial is redrawn."""


class RngPathology(XnetsimError):
    """Bounded redraw loop failed to produce a usable random draw."""


class Infeasible(XnetsimError):
    """No commutator witness exists for this matrix (multiplicity too high)."""


class InsufficientData(XnetsimError):
    """Not enough error events in the requested window to fit a slope."""


class ConfigError(XnetsimError):
    """Simulation config failed validation; message names the field."""


class IoError(XnetsimError):
    """File could not be read or written."""


class ParseError(XnetsimError):
    """Malformed results file; message carries the line number."""


class EmptyData(XnetsimError):
    """No plottable points after filtering."""
