"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the command layer can
translate any propagated failure without a lookup table.
"""


class SDMError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigurationError(SDMError, ValueError):
    """Invalid configuration, parameter or argument."""

    exit_code = 1


class DataError(SDMError, ValueError):
    """Malformed or insufficient input data."""

    exit_code = 2


class DegenerateUpdateError(SDMError, ArithmeticError):
    """The Bayes update produced no usable mass (underflow or zero variance)."""

    exit_code = 3

    def __init__(self, message, step_index=None):
        if step_index is not None:
            message = f"{message} (step {step_index})"
        super().__init__(message)
        self.step_index = step_index
