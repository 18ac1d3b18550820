class InputError(ValueError):
    """Raised when input data cannot be parsed or fails validation."""


class ConfigError(ValueError):
    """Raised for invalid test, simulation or CLI configuration."""
