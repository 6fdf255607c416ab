"""
Exception hierarchy for the erasure laboratory.
Library code raises these; app.py maps them to exit codes.
"""


class QuantumEraserError(Exception):
    """Base class for every error raised by the modules package."""


class ZeroNormError(QuantumEraserError):
    """A filter absorbed the whole state (norm below 1e-14)."""


class NotHermitianError(QuantumEraserError):
    pass


class DomainError(QuantumEraserError):
    """An argument lies outside its physical range."""


class DegenerateBranchError(QuantumEraserError):
    """One path branch has (numerically) zero weight, so c is undefined."""


class RootNotFoundError(QuantumEraserError):
    """No probe angle zeroes the |O+M-> amplitude (input is not a pure real-phase state)."""


class NotNormalizedError(QuantumEraserError):
    pass


class InsufficientCountsError(QuantumEraserError):
    pass


class SettingsMismatchError(QuantumEraserError):
    """Coincidence data taken at different probe angles or in the wrong analyzer basis."""


class ScenarioError(QuantumEraserError):
    """Invalid scenario specification. `field` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
