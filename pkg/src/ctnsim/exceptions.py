"""Exception types shared across the package."""


class CtnError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(CtnError, ValueError):
    """Operands act on different numbers of qubits."""


class PauliParseError(CtnError, ValueError):
    """Malformed Pauli-string text; carries the offending index."""

    def __init__(self, text, index, message=None):
        self.text = text
        self.index = index
        super().__init__(message or f"invalid character {text[index]!r} at index {index} in {text!r}")


class SizeGuard(CtnError, ValueError):
    """Dense/statevector operation requested above its qubit-count guard."""


class ValidationError(CtnError, ValueError):
    """Invalid argument or configuration value."""
