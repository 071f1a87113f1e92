"""Exception hierarchy shared across the toolkit.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented process exit codes: 2 = bad input, 3 = I/O failure, 4 = internal
invariant violation.
"""


class DaqError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


# --- file format / tensor container ---------------------------------------

class BadMagic(DaqError):
    """File does not start with the expected magic bytes."""


class VersionMismatch(DaqError):
    """File declares an unsupported format version."""


class NonFiniteValue(DaqError):
    """Payload contains NaN or Inf."""


class TruncatedPayload(DaqError):
    """Payload size disagrees with the declared dimensions."""


class InvalidShape(DaqError):
    """Degenerate or inconsistent tensor dimensions."""


class IoError(DaqError):
    """Underlying OS-level read/write failure."""

    exit_code = 3


# --- formats / quantizer ----------------------------------------------------

class UnsupportedBitWidth(DaqError):
    """Requested bit width outside the supported range."""


class DegenerateRange(DaqError):
    """Dynamic range has zero (or near-zero) width."""


class CodeOutOfRange(DaqError):
    """A code index does not fit the format's bit width."""


class LayoutMismatch(DaqError):
    """Groups do not agree with the declared group layout."""


class IndivisibleGroupSize(DaqError):
    """Group size does not divide the tensor's column count."""


class ShapeMismatch(DaqError):
    """Operand shapes are incompatible."""


# --- metrics / reporting ----------------------------------------------------

class EmptyInput(DaqError):
    """Operation requires at least one value."""


class ZeroBaseline(DaqError):
    """Improvement is undefined for a non-positive baseline loss."""


class InputMismatch(DaqError):
    """Jobs being compared do not share identical inputs."""


class VerificationError(DaqError):
    """Recomputed results disagree with a stored artifact or report."""

    exit_code = 4
