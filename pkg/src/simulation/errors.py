"""
Error types raised by the simulator.
"""

from typing import Optional


class LoraSimError(Exception):
    """Base class for every error raised by the simulator."""


class InvalidArgumentError(LoraSimError, ValueError):
    """An operation received an argument outside its domain."""


class ConfigurationError(LoraSimError):
    """
    A configuration document or a derived quantity is invalid.

    Attributes:
        key (Optional[str]): Offending configuration key, if known
        line (Optional[int]): 1-based line of the key in the parsed document
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = []
        if key is not None:
            location.append(f"key '{key}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class NoGatewayError(LoraSimError):
    """A realization contains no gateway to connect to."""
