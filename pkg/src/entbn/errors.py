"""Exception hierarchy. Each class maps to a distinct CLI exit code."""


class EntbnError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(EntbnError):
    """Malformed arguments: variable mismatch, bad states, bad options."""

    exit_code = 3


class StructuralError(EntbnError):
    """Graph violates acyclicity or references unknown nodes."""

    exit_code = 4


class IngestionError(EntbnError):
    """CSV file could not be parsed into a valid dataset."""

    exit_code = 5


class InconsistentEvidenceError(EntbnError):
    """Evidence has probability zero under the model."""

    exit_code = 6


class DegenerateEvidenceError(EntbnError):
    """All importance weights are zero."""

    exit_code = 7


class AcceptanceStarvationError(EntbnError):
    """Rejection sampling hit its attempt cap before collecting enough samples."""

    exit_code = 8

    def __init__(self, message, acceptance_rate=0.0):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate


class InitializationError(EntbnError):
    """Could not draw a starting state consistent with the evidence."""

    exit_code = 9


class CapacityError(EntbnError):
    """Problem size exceeds a hard guard (e.g. enumeration over too many variables)."""

    exit_code = 10


class SplitError(EntbnError):
    """No train/test split satisfying the class-coverage guarantee was found."""

    exit_code = 11
