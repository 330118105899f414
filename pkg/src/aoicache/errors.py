"""Exception types shared across the simulator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(SimError, ValueError):
    """Base class for configuration validation failures."""


class InvalidTopology(ConfigError):
    """Region count does not tile into the RSU layout."""


class NonPositiveLimit(ConfigError):
    """A quantity that must be >= 1 (or strictly positive) is not."""


class NegativeParameter(ConfigError):
    """A cost, weight, rate, or tradeoff coefficient is negative."""


class BadProbability(ConfigError):
    """A probability parameter lies outside [0, 1]."""


class BadPopularityMode(ConfigError):
    """Popularity mode is unknown or carries an illegal parameter."""


class UnknownConfigKey(ConfigError):
    """The config JSON contains a key that is not a SystemConfig field."""


class IndexOutOfRange(SimError, IndexError):
    """An RSU or content index is outside the configured topology."""


class LengthMismatch(SimError, ValueError):
    """Vector arguments disagree on length."""


class ConstraintViolation(SimError, ValueError):
    """An update action breaks the one-refresh-per-RSU or coverage constraint."""


class BadDiscount(SimError, ValueError):
    """MDP discount factor outside [0, 1)."""


class BadEpsilon(SimError, ValueError):
    """Value-iteration tolerance is not strictly positive."""


class MissingPolicy(SimError):
    """No solved per-content policy exists for a covered (rsu, content) pair."""


class UnknownKind(SimError, ValueError):
    """Unrecognized policy/baseline kind."""


class BadPeriod(SimError, ValueError):
    """Periodic service period below 1."""


class NegativeArrivals(SimError, ValueError):
    """Queue arrivals must be nonnegative."""


class OutOfCoverage(SimError, ValueError):
    """Content index is not covered by the given RSU."""


class EmptyTraces(SimError, ValueError):
    """An aggregate was requested over an empty trace list."""


class IoFailure(SimError):
    """Wraps OS-level failures while reading or writing artifacts."""
