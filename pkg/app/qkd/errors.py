class KeyRateError(ValueError):
    """Base class for rejected inputs anywhere in the key-rate engine.

    Messages start with a short machine-friendly reason code followed by a
    human-readable explanation, e.g. ``"dimension_mismatch: 3 != 4"``.
    """


class DimensionError(KeyRateError):
    """Matrix/vector shapes do not conform."""


class RankError(KeyRateError):
    """A matrix that must have full row rank does not."""


class SizeGuardError(KeyRateError):
    """An exhaustive enumeration would exceed its configured guard."""


class ChannelError(KeyRateError):
    """Channel parameters outside their physical range."""


class ParameterError(KeyRateError):
    """A scalar parameter (probability, count, tolerance) is out of range."""


class CodeFormatError(KeyRateError):
    """Malformed code description; carries the 1-based line number."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"code_format: line {line}: {reason}")
