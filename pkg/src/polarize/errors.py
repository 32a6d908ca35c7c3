"""Exception types shared across the package."""


class GuardError(ValueError):
    """A mathematical precondition was violated (bad dimension, range, or norm)."""


class ConfigError(ValueError):
    """A scenario or input file failed to parse or validate."""
