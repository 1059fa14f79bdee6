"""Exception types carrying a short machine-readable code."""


class OptomechError(Exception):
    """Base error. ``code`` is a stable identifier such as ``"SINGULAR_SYSTEM"``."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}")


class ConfigError(OptomechError):
    """Bad user input: malformed config, unknown key, out-of-range value."""


class NumericalError(OptomechError):
    """A computation could not be completed to the requested accuracy."""


class PreconditionError(OptomechError):
    """Inputs outside the domain where a closed-form result holds."""
