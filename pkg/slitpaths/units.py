"""
SlitPaths - Units
Lengths are stored in meters; config values may carry a unit suffix
"""

import re

from slitpaths.errors import ConfigError

LENGTH_UNITS = {
    'm': 1.0,
    'mm': 1e-3,
    'um': 1e-6,
    'µm': 1e-6,
    'μm': 1e-6,
    'nm': 1e-9,
    'pm': 1e-12,
}

_LENGTH_RE = re.compile(
    r'^\s*(?P<value>[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)\s*(?P<unit>[a-zµμ]*)\s*$'
)


def parse_length(value, field='length'):
    """
    Parse a length into meters.
    Accepts plain numbers (already meters) or strings like "810nm", "1 mm", "-1.75mm".
    """
    if isinstance(value, bool):
        raise ConfigError(field, f"expected a length, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(field, f"expected a length, got {value!r}")

    match = _LENGTH_RE.match(value)
    if not match:
        raise ConfigError(field, f"cannot parse length {value!r}")

    unit = match.group('unit') or 'm'
    if unit not in LENGTH_UNITS:
        raise ConfigError(field, f"unknown length unit {unit!r} in {value!r}")
    return float(match.group('value')) * LENGTH_UNITS[unit]


def parse_length_pair(value, field):
    """Parse "y1,y2" (or a two-item list) into a pair of meters"""
    if isinstance(value, str):
        parts = [p for p in value.split(',') if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise ConfigError(field, f"expected two lengths, got {value!r}")
    if len(parts) != 2:
        raise ConfigError(field, f"expected two lengths, got {value!r}")
    return parse_length(parts[0], field), parse_length(parts[1], field)


def format_length(meters):
    """Human-readable length for log lines"""
    magnitude = abs(meters)
    for unit, scale in (('mm', 1e-3), ('um', 1e-6), ('nm', 1e-9)):
        if magnitude >= scale:
            return f"{meters / scale:g}{unit}"
    return f"{meters:g}m"
