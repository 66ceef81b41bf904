"""Exception types shared across the package.

Plain argument misuse raises ValueError; the classes here cover failure
modes that callers (notably the CLI) need to tell apart.
"""


class ConfigError(Exception):
    """Invalid run configuration (CLI exit code 1)."""


class ConfigSyntaxError(ConfigError):
    """Config document could not be parsed at all."""


class UnknownConfigKeyError(ConfigError):
    """Config document contains a key this package does not define."""


class ConfigConstraintError(ConfigError):
    """A config value violates a documented constraint."""


class NumericError(Exception):
    """Numerical routine failed, e.g. eigensolver non-convergence (CLI exit code 2)."""


class StatisticsError(Exception):
    """Not enough data for a meaningful statistic."""
