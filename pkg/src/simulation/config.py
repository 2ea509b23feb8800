"""
Configuration utilities for the simulator.

Configuration documents are flat `key = value` files with `#` comments,
parsed with python-dotenv's stream parser. Missing keys take the defaults
of `SimConfig`; run manifests use the same grammar and can be fed back in.
"""

import io
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from dotenv.parser import parse_stream
from pydantic import ValidationError

from ..schemas.sim_schemas import FadingKind, GatewayMode, InterferenceMode, SimConfig
from .errors import ConfigurationError

# First line of every run manifest; only such documents may carry MANIFEST_ONLY_KEYS
MANIFEST_HEADER = "# lorawan-uplink-sim run manifest"

# Keys written to run manifests that carry results rather than inputs
MANIFEST_ONLY_KEYS = frozenset({
    'version',
    'channel',
    'duration_s',
    'trials_per_bin',
    'no_gateway_trials',
    'packet_bytes',
    'throughput_formula',
    'sf_boundaries_resolved',
    'analytic_h1',
    'coverage_trials',
    'coverage_p_h1',
    'coverage_p_h2',
    'coverage_p_success',
    'coverage_p_success_ci',
    'coverage_no_gateway',
    'coverage_mean_throughput_bps',
})

_TRUE = {'true', 'yes', 'on', '1'}
_FALSE = {'false', 'no', 'off', '0'}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got '{text}'")


def _parse_float_list(text: str) -> Tuple[float, ...]:
    parts = [p.strip() for p in text.split(',') if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    return tuple(float(p) for p in parts)


def _parse_bins(text: str) -> Tuple[float, ...]:
    """Comma-separated distances, or `start:stop:step` with stop included when reached."""
    if ':' not in text:
        return _parse_float_list(text)
    pieces = text.split(':')
    if len(pieces) != 3:
        raise ValueError("range must be start:stop:step")
    start, stop, step = (float(p) for p in pieces)
    if not step > 0:
        raise ValueError("range step must be positive")
    if stop < start:
        raise ValueError("range stop must not be below start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # Rounding removes accumulated binary noise such as 0.30000000000000004
    return tuple(round(start + i * step, 9) for i in range(count))


def _parse_boundaries(text: str) -> Optional[Tuple[float, ...]]:
    if text.strip().lower() in {'', 'auto', 'none'}:
        return None
    return _parse_float_list(text)


_PARSERS: Dict[str, Callable[[str], Any]] = {
    'radius_km': float,
    'gw_intensity': float,
    'ed_intensity': float,
    'tx_power_dbm': float,
    'bandwidth_hz': float,
    'noise_figure_db': float,
    'wavelength_km': float,
    'eta': float,
    'fading': lambda v: FadingKind(v.strip().lower()),
    'rician_k': float,
    'trials': int,
    'seed': int,
    'gateway_mode': lambda v: GatewayMode(v.strip().lower()),
    'interference_mode': lambda v: InterferenceMode(v.strip().lower()),
    'bins': _parse_bins,
    'sf_boundaries': _parse_boundaries,
    'independent_events': _parse_bool,
    'workers': int,
}


def _binding_line(binding: Any) -> int:
    # Blank lines before an entry are folded into its original text
    text = binding.original.string
    leading = text[:len(text) - len(text.lstrip())]
    return binding.original.line + leading.count("\n")


def parse_config(text: str) -> SimConfig:
    """
    Parse a configuration document into a validated SimConfig.

    Args:
        text (str): Flat `key = value` document

    Returns:
        SimConfig: Configuration with every missing key defaulted

    Raises:
        ConfigurationError: On an unknown or repeated key, a malformed value,
            or an invariant violation; the error names the key and line
    """
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    is_manifest = text.lstrip("\ufeff").split("\n", 1)[0].strip() == MANIFEST_HEADER

    for binding in parse_stream(io.StringIO(text)):
        line = _binding_line(binding)
        if binding.error:
            raise ConfigurationError(
                f"malformed entry '{binding.original.string.strip()}'", line=line
            )
        key = binding.key
        if key is None:
            continue
        if is_manifest and key in MANIFEST_ONLY_KEYS:
            continue
        if key not in _PARSERS:
            raise ConfigurationError("unknown key", key=key, line=line)
        if key in values:
            raise ConfigurationError(f"duplicate key, first set on line {lines[key]}", key=key, line=line)
        if binding.value is None:
            raise ConfigurationError("missing value", key=key, line=line)
        try:
            values[key] = _PARSERS[key](binding.value)
        except ValueError as e:
            raise ConfigurationError(f"malformed value '{binding.value}': {e}", key=key, line=line) from e
        lines[key] = line

    return build_config(values, lines)


def build_config(values: Dict[str, Any], lines: Optional[Dict[str, int]] = None) -> SimConfig:
    """Construct a SimConfig, translating validation failures into ConfigurationError."""
    lines = lines or {}
    try:
        return SimConfig(**values)
    except ValidationError as e:
        first = e.errors()[0]
        key = str(first['loc'][0]) if first['loc'] else _key_from_message(first['msg'])
        raise ConfigurationError(first['msg'], key=key, line=lines.get(key)) from e


def _key_from_message(message: str) -> Optional[str]:
    # Cross-field validators prefix their messages with the field name
    head = message.removeprefix('Value error, ').split(':', 1)[0]
    return head if head in _PARSERS else None


def load_config(path: Union[str, Path]) -> SimConfig:
    """
    Read and parse a configuration file.

    Raises:
        ConfigurationError: If the file cannot be read or does not parse
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigurationError(f"cannot read config file '{path}': {e.strerror or e}") from e
    return parse_config(text)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ','.join(_format_value(v) for v in value)
    if hasattr(value, 'value'):
        return str(value.value)
    if value is None:
        return 'auto'
    return str(value)


def config_to_lines(config: SimConfig) -> List[str]:
    """Every config field as a `key = value` line; floats use repr so they parse back exactly."""
    return [f"{key} = {_format_value(getattr(config, key))}" for key in SimConfig.model_fields]


def config_to_text(config: SimConfig) -> str:
    return '\n'.join(config_to_lines(config)) + '\n'


def apply_overrides(config: SimConfig, **overrides: Any) -> SimConfig:
    """Copy of `config` with the non-None overrides applied and re-validated."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return config
    return build_config({**config.model_dump(), **updates})
