"""Utility functions, configuration and errors."""

from . import config

__all__ = ["config"]
