"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters; CLI maps this to exit code 2."""


class DomainError(ValueError):
    """Query outside the state's domain (site/time/position out of range)."""


class DuplicateCoordinateError(ConfigError):
    """A mark collides with an existing breakpoint coordinate."""


class InvariantError(AssertionError):
    """A runtime invariant scan failed; CLI maps this to exit code 4."""
