"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: bad units, missing files, inconsistent grids.

    Raised before any computation starts; maps to CLI exit code 1.
    """
