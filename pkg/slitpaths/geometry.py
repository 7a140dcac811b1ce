"""
SlitPaths - Geometry
Slit layout, screen sampling grid, and quadrature settings

Coordinates follow the experiment: the source sits at (-S, 0), the slit plane
is x = 0, and the screen is the line x = D. Slit A is centered at +d/2 and
slit B at -d/2. All lengths are meters.
"""

import math
import numbers
import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from slitpaths.errors import GeometryError

logger = logging.getLogger(__name__)

DEFAULT_NODES_PER_WAVELENGTH = 16
MIN_NODES_PER_WAVELENGTH = 4
DEFAULT_TOLERANCE = 1e-6


class Slit(Enum):
    A = "A"
    B = "B"
    C = "C"


class QuadratureScheme(Enum):
    GAUSS_LEGENDRE = "gauss-legendre"
    SIMPSON = "simpson"


class PropagatorMode(Enum):
    FRAUNHOFER = "fraunhofer"
    EXACT = "exact"


@dataclass(frozen=True)
class Aperture:
    """One slit opening in the slit plane"""
    name: str
    center: float
    width: float

    @property
    def lower(self):
        return self.center - self.width / 2

    @property
    def upper(self):
        return self.center + self.width / 2

    @property
    def reach(self):
        """Largest |y| inside the opening"""
        return abs(self.center) + self.width / 2

    def mirrored(self):
        return Aperture(self.name, -self.center, self.width)


def _require_positive(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise GeometryError(name, f"expected a number, got {value!r}")
    if not math.isfinite(value) or value <= 0:
        raise GeometryError(name, f"must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class SlitGeometry:
    """Fixed physical parameters of the double-slit experiment"""
    source_distance: float
    screen_distance: float
    slit_separation: float
    slit_width: float
    wavelength: float

    def __post_init__(self):
        _require_positive('source_distance', self.source_distance)
        _require_positive('screen_distance', self.screen_distance)
        _require_positive('slit_separation', self.slit_separation)
        _require_positive('slit_width', self.slit_width)
        _require_positive('wavelength', self.wavelength)
        if self.slit_separation <= self.slit_width:
            raise GeometryError(
                'slit_separation',
                f"overlapping slits: separation {self.slit_separation:g} m "
                f"must exceed width {self.slit_width:g} m",
            )

    @property
    def wavenumber(self):
        return 2 * math.pi / self.wavelength

    def aperture(self, slit):
        """Opening of slit A (upper) or B (lower)"""
        slit = Slit(slit)
        half = self.slit_separation / 2
        if slit is Slit.A:
            return Aperture('A', half, self.slit_width)
        if slit is Slit.B:
            return Aperture('B', -half, self.slit_width)
        raise GeometryError('slit', "the double-slit layout has only slits A and B")

    def apertures(self):
        return self.aperture(Slit.A), self.aperture(Slit.B)


def make_geometry(source_distance, screen_distance, slit_separation, slit_width, wavelength):
    """Build a validated SlitGeometry (all arguments in meters)"""
    geom = SlitGeometry(
        source_distance=source_distance,
        screen_distance=screen_distance,
        slit_separation=slit_separation,
        slit_width=slit_width,
        wavelength=wavelength,
    )
    logger.debug(
        f"Geometry: S={source_distance:g} D={screen_distance:g} d={slit_separation:g} "
        f"w={slit_width:g} lambda={wavelength:g} k={geom.wavenumber:.6e}"
    )
    return geom


def triple_slit_apertures(geom):
    """
    Three slits of width w centered at +d, 0 and -d (labelled A, B, C).
    Adjacent openings are disjoint because d > w.
    """
    d = geom.slit_separation
    w = geom.slit_width
    return (
        Aperture('A', d, w),
        Aperture('B', 0.0, w),
        Aperture('C', -d, w),
    )


@dataclass(frozen=True)
class ScreenGrid:
    """Ordered screen sample positions y_D"""
    y_values: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        y = np.array(self.y_values, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise GeometryError('n_points', "a screen grid needs at least two points")
        if not np.all(np.isfinite(y)):
            raise GeometryError('y_values', "screen positions must be finite")
        if not np.all(np.diff(y) > 0):
            raise GeometryError('y_values', "screen positions must be strictly increasing")
        if self.symmetric and not np.array_equal(y, -y[::-1]):
            raise GeometryError('symmetric', "grid is flagged symmetric but -y is missing for some y")
        y.setflags(write=False)
        object.__setattr__(self, 'y_values', y)

    def __len__(self):
        return self.y_values.size

    @property
    def y_min(self):
        return float(self.y_values[0])

    @property
    def y_max(self):
        return float(self.y_values[-1])

    @property
    def reach(self):
        return float(np.max(np.abs(self.y_values)))

    def index_nearest(self, y=0.0):
        return int(np.argmin(np.abs(self.y_values - y)))

    def same_as(self, other):
        return self is other or np.array_equal(self.y_values, other.y_values)

    def window(self, y1, y2):
        """Boolean mask of grid points with y1 <= y <= y2"""
        return (self.y_values >= y1) & (self.y_values <= y2)

    def subset(self, indices):
        """Grid restricted to the given (sorted) indices"""
        return ScreenGrid(self.y_values[np.asarray(indices)], symmetric=False)


def make_grid(y_min, y_max, n_points, symmetric=False):
    """Uniform screen grid; symmetric grids are built outward from y = 0"""
    if not y_min < y_max:
        raise GeometryError('y_min', f"y_min ({y_min:g}) must be below y_max ({y_max:g})")
    if int(n_points) != n_points or n_points < 2:
        raise GeometryError('n_points', f"need an integer >= 2, got {n_points!r}")
    n_points = int(n_points)

    if symmetric:
        if y_min != -y_max:
            raise GeometryError('symmetric', f"symmetric grid needs y_min = -y_max, got [{y_min:g}, {y_max:g}]")
        half = (n_points - 1) / 2
        step = (y_max - y_min) / (n_points - 1)
        y = (np.arange(n_points) - half) * step
        # pin the ends so the grid spans exactly [y_min, y_max]
        y[0], y[-1] = y_min, y_max
    else:
        y = np.linspace(y_min, y_max, n_points)

    return ScreenGrid(y, symmetric=symmetric)


@dataclass(frozen=True)
class QuadratureSpec:
    """How the slit-aperture integrals are discretized"""
    nodes_per_wavelength: int = DEFAULT_NODES_PER_WAVELENGTH
    scheme: QuadratureScheme = QuadratureScheme.GAUSS_LEGENDRE
    mode: PropagatorMode = PropagatorMode.FRAUNHOFER
    tolerance: float = DEFAULT_TOLERANCE
    verify: bool = False

    def __post_init__(self):
        npw = self.nodes_per_wavelength
        if isinstance(npw, bool) or int(npw) != npw or npw < MIN_NODES_PER_WAVELENGTH:
            raise GeometryError(
                'nodes_per_wavelength',
                f"need an integer >= {MIN_NODES_PER_WAVELENGTH}, got {npw!r}",
            )
        object.__setattr__(self, 'nodes_per_wavelength', int(npw))
        try:
            object.__setattr__(self, 'scheme', QuadratureScheme(self.scheme))
        except ValueError:
            raise GeometryError('scheme', f"unknown quadrature scheme {self.scheme!r}") from None
        try:
            object.__setattr__(self, 'mode', PropagatorMode(self.mode))
        except ValueError:
            raise GeometryError('mode', f"unknown propagator mode {self.mode!r}") from None
        if not self.tolerance > 0:
            raise GeometryError('tolerance', f"must be positive, got {self.tolerance!r}")

    def refined(self):
        """Same rule with twice the node density; never re-verifies itself"""
        return replace(self, nodes_per_wavelength=2 * self.nodes_per_wavelength, verify=False)

    def with_mode(self, mode):
        return replace(self, mode=PropagatorMode(mode))
