class ContractViolation(ValueError):
    """An operation was called with arguments outside its contract."""


class ConfigurationError(ValueError):
    """Invalid algorithm or experiment configuration."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
