"""Hourly mutual-information stock networks and index-change predictors."""

from netpredict.errors import ConfigError, DataError, NumericError

__all__ = ["ConfigError", "DataError", "NumericError"]
__version__ = "0.1.0"
