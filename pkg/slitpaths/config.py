"""
SlitPaths - Configuration
Layered run configuration: package defaults, TOML file, SLITPATHS_* environment
variables, then command-line flags. Layering uses Flask's Config object; the
merged mapping is parsed into an immutable RunConfig.
"""

import os
import json
import hashlib
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, replace

from flask import Config

from slitpaths.errors import ConfigError
from slitpaths.geometry import QuadratureSpec, make_geometry, make_grid
from slitpaths.units import parse_length, parse_length_pair

logger = logging.getLogger(__name__)

ENV_PREFIX = 'SLITPATHS'

# Case-study parameters
DEFAULTS = {
    'SOURCE_DISTANCE': '1mm',
    'SCREEN_DISTANCE': '1mm',
    'SLIT_SEPARATION': '2000nm',
    'SLIT_WIDTH': '500nm',
    'WAVELENGTH': '810nm',
    'Y_MIN': '-1.75mm',
    'Y_MAX': '1.75mm',
    'N_POINTS': 7001,
    'SYMMETRIC': True,
    'NODES_PER_WAVELENGTH': 16,
    'SCHEME': 'gauss-legendre',
    'MODE': 'fraunhofer',
    'TOLERANCE': 1e-6,
    'VERIFY_CONVERGENCE': True,
    'CLASSICAL_ONLY': False,
    'EFFICIENCIES': [0.25, 0.5, 0.75, 1.0],
    'WINDOW': None,
    'THRESHOLD': 1e-2,
    'OUT': 'slitpaths.csv',
    'WORKERS': 1,
    'CACHE_DIR': None,
}

KEY_ALIASES = {'LAMBDA': 'WAVELENGTH'}

# Keys whose values change the computed fields
PHYSICS_KEYS = (
    'source_distance', 'screen_distance', 'slit_separation', 'slit_width', 'wavelength',
    'y_min', 'y_max', 'n_points', 'symmetric', 'nodes_per_wavelength', 'scheme', 'mode',
)


def _normalize_keys(mapping, source):
    normalized = {}
    for key, value in mapping.items():
        upper = KEY_ALIASES.get(key.upper(), key.upper())
        if upper not in DEFAULTS:
            raise ConfigError(key, f"unknown configuration key in {source}")
        normalized[upper] = value
    return normalized


def _load_toml(handle):
    try:
        data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError('config', f"invalid TOML: {e}") from None
    return _normalize_keys(data, getattr(handle, 'name', 'config file'))


def _parse_bool(value, field):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ('true', 'yes', '1', 'on'):
        return True
    if isinstance(value, str) and value.strip().lower() in ('false', 'no', '0', 'off'):
        return False
    raise ConfigError(field, f"expected true/false, got {value!r}")


def _parse_int(value, field, minimum):
    try:
        if isinstance(value, bool):
            raise ValueError
        number = int(value)
        if isinstance(value, float) and number != value:
            raise ValueError
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected an integer, got {value!r}") from None
    if number < minimum:
        raise ConfigError(field, f"must be at least {minimum}, got {number}")
    return number


def _parse_float(value, field):
    try:
        if isinstance(value, bool):
            raise ValueError
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected a number, got {value!r}") from None


def _parse_efficiencies(value, field='efficiencies'):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        items = [value]
    elif isinstance(value, str):
        items = [item for item in value.split(',') if item.strip()]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        raise ConfigError(field, f"expected a list of efficiencies, got {value!r}")
    if not items:
        raise ConfigError(field, "needs at least one efficiency")
    efficiencies = tuple(_parse_float(item, field) for item in items)
    for n in efficiencies:
        if not 0 <= n <= 1:
            raise ConfigError(field, f"efficiency {n!r} outside [0, 1]")
    return efficiencies


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; lengths in meters"""
    source_distance: float
    screen_distance: float
    slit_separation: float
    slit_width: float
    wavelength: float
    y_min: float
    y_max: float
    n_points: int
    symmetric: bool
    nodes_per_wavelength: int
    scheme: str
    mode: str
    tolerance: float
    verify_convergence: bool
    classical_only: bool
    efficiencies: tuple
    window: tuple
    threshold: float
    out: str
    workers: int
    cache_dir: str = None

    @classmethod
    def from_mapping(cls, mapping):
        """Parse a merged (uppercase-keyed) mapping, naming the field on any failure"""
        get = lambda key: mapping.get(key, DEFAULTS[key])

        window = get('WINDOW')
        cache_dir = get('CACHE_DIR')
        config = cls(
            source_distance=parse_length(get('SOURCE_DISTANCE'), 'source_distance'),
            screen_distance=parse_length(get('SCREEN_DISTANCE'), 'screen_distance'),
            slit_separation=parse_length(get('SLIT_SEPARATION'), 'slit_separation'),
            slit_width=parse_length(get('SLIT_WIDTH'), 'slit_width'),
            wavelength=parse_length(get('WAVELENGTH'), 'wavelength'),
            y_min=parse_length(get('Y_MIN'), 'y_min'),
            y_max=parse_length(get('Y_MAX'), 'y_max'),
            n_points=_parse_int(get('N_POINTS'), 'n_points', 2),
            symmetric=_parse_bool(get('SYMMETRIC'), 'symmetric'),
            nodes_per_wavelength=_parse_int(get('NODES_PER_WAVELENGTH'), 'nodes_per_wavelength', 1),
            scheme=str(get('SCHEME')).lower(),
            mode=str(get('MODE')).lower(),
            tolerance=_parse_float(get('TOLERANCE'), 'tolerance'),
            verify_convergence=_parse_bool(get('VERIFY_CONVERGENCE'), 'verify_convergence'),
            classical_only=_parse_bool(get('CLASSICAL_ONLY'), 'classical_only'),
            efficiencies=_parse_efficiencies(get('EFFICIENCIES')),
            window=None if window is None else parse_length_pair(window, 'window'),
            threshold=_parse_float(get('THRESHOLD'), 'threshold'),
            out=str(get('OUT')),
            workers=_parse_int(get('WORKERS'), 'workers', 1),
            cache_dir=None if cache_dir in (None, '') else str(cache_dir),
        )
        config.validate()
        return config

    def validate(self):
        """Build every derived object once so invalid combinations fail early"""
        self.geometry()
        grid = self.grid()
        self.quadrature()
        if not self.threshold > 0:
            raise ConfigError('threshold', f"must be positive, got {self.threshold!r}")
        if self.window is not None:
            y1, y2 = self.window
            if not y1 < y2:
                raise ConfigError('window', f"y1 must be below y2, got {self.window!r}")
            if y1 < grid.y_min or y2 > grid.y_max:
                raise ConfigError('window', f"{self.window!r} lies outside the screen grid")

    def geometry(self):
        return make_geometry(
            self.source_distance, self.screen_distance,
            self.slit_separation, self.slit_width, self.wavelength,
        )

    def grid(self):
        return make_grid(self.y_min, self.y_max, self.n_points, self.symmetric)

    def quadrature(self):
        """Quadrature settings; commands check convergence on sampled points, see verify_convergence"""
        return QuadratureSpec(
            nodes_per_wavelength=self.nodes_per_wavelength,
            scheme=self.scheme,
            mode=self.mode,
            tolerance=self.tolerance,
        )

    def delta_av_window(self):
        """Configured window, or the full screen"""
        return self.window if self.window is not None else (self.y_min, self.y_max)

    def echo_items(self):
        """(key, TOML-ready value) pairs; None values are left out"""
        items = []
        for key in DEFAULTS:
            value = getattr(self, key.lower())
            if value is None:
                continue
            if isinstance(value, tuple):
                value = list(value)
            items.append((key.lower(), value))
        return items

    def echo_lines(self):
        return [f"{key} = {json.dumps(value)}" for key, value in self.echo_items()]

    @classmethod
    def from_echo(cls, lines):
        """Rebuild a RunConfig from echo_lines() output"""
        try:
            data = tomllib.loads("\n".join(lines))
        except tomllib.TOMLDecodeError as e:
            raise ConfigError('config', f"unreadable config echo: {e}") from None
        return cls.from_mapping(_normalize_keys(data, 'config echo'))

    def digest(self, keys=None):
        """SHA-256 over the echoed values of `keys` (all keys by default)"""
        items = self.echo_items()
        if keys is not None:
            items = [(key, value) for key, value in items if key in keys]
        payload = json.dumps(items, separators=(',', ':'))
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()

    def with_overrides(self, **changes):
        return replace(self, **changes)


def build_config(path=None, overrides=None, env_prefix=ENV_PREFIX):
    """Flask Config with defaults, file, environment and overrides applied in order"""
    config = Config(os.getcwd(), defaults=DEFAULTS)
    if path:
        config.from_file(os.fspath(path), load=_load_toml, text=False)
        logger.debug(f"Loaded configuration file {path}")

    config.from_prefixed_env(env_prefix)
    unknown = [key for key in config if key not in DEFAULTS]
    for key in unknown:
        logger.debug(f"Ignoring unrelated environment setting {env_prefix}_{key}")
        del config[key]

    if overrides:
        config.from_mapping(_normalize_keys(
            {key: value for key, value in overrides.items() if value is not None},
            'command-line flags',
        ))
    return config


def load_config(path=None, overrides=None, env_prefix=ENV_PREFIX):
    """Layered RunConfig: defaults < TOML file < environment < overrides"""
    return RunConfig.from_mapping(build_config(path, overrides, env_prefix))
