"""
LoRa uplink Monte Carlo simulation package.
"""

from .config import load_config, parse_config, config_to_text, apply_overrides
from .engine import run_trial, run_sweep, run_coverage, throughput
from .errors import LoraSimError, InvalidArgumentError, ConfigurationError, NoGatewayError

__version__ = '0.1.0'

__all__ = [
    'load_config',
    'parse_config',
    'config_to_text',
    'apply_overrides',
    'run_trial',
    'run_sweep',
    'run_coverage',
    'throughput',
    'LoraSimError',
    'InvalidArgumentError',
    'ConfigurationError',
    'NoGatewayError'
]
