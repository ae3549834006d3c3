"""Exception hierarchy shared across the toolkit."""


class QfeError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(QfeError):
    """Structurally invalid parameters, bounds, or dimensions."""

    exit_code = 6


class DimensionError(ValidationError):
    """Mismatched vector/matrix dimensions."""


class OutOfBoundsError(ValidationError):
    """Plaintext or coefficient outside the declared bound."""

    exit_code = 5


class OutOfRangeError(QfeError):
    """Bounded discrete logarithm target outside the table range.

    Signals a miscomputed bound or a key/ciphertext mismatch.
    """

    exit_code = 5


class MemoryCapError(QfeError):
    """Discrete-log table would exceed the configured memory cap."""

    exit_code = 5


class FormatError(QfeError):
    """Malformed serialized artifact (bad magic, version, truncation...)."""

    exit_code = 3

    def __init__(self, message, section=None):
        self.section = section
        super().__init__(message if section is None else f"{section}: {message}")


class CurveMismatchError(FormatError):
    """Artifact was produced for a different curve."""

    exit_code = 4
