"""
SlitPaths - Detection Models
Perfect which-way detector distributions, interference differences,
the I_AB Born-rule parameter, and the triple-slit Sorkin parameter
"""

import logging
from dataclasses import dataclass

import numpy as np

from slitpaths.errors import DegenerateError, GridMismatchError

logger = logging.getLogger(__name__)

SETUP_COLUMNS = ('P_AB', 'P_DA', 'P_DB', 'P_DADB', 'P_DAB')
TRIPLE_COLUMNS = ('P_ABC', 'P_AB', 'P_AC', 'P_BC', 'P_A', 'P_B', 'P_C')


def as_profile(grid, values, name, dtype=float):
    array = np.array(values, dtype=dtype)
    if array.shape != (len(grid),):
        raise GridMismatchError(f"{name} has shape {array.shape}, grid has {len(grid)} points")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class WaveComponents:
    """Complex fields ψ_A, ψ_B, ψ_AB sampled on a screen grid"""
    grid: object
    psi_A: np.ndarray
    psi_B: np.ndarray
    psi_AB: np.ndarray

    def __post_init__(self):
        for name in ('psi_A', 'psi_B', 'psi_AB'):
            object.__setattr__(self, name, as_profile(self.grid, getattr(self, name), name, complex))

    def without_nonclassical(self):
        """Same classical fields with ψ_AB switched off"""
        return WaveComponents(self.grid, self.psi_A, self.psi_B, np.zeros_like(self.psi_AB))


@dataclass(frozen=True)
class SetupDistributions:
    """The five detector-setup intensity profiles and the P_AB(0) normalization"""
    grid: object
    P_AB: np.ndarray
    P_DA: np.ndarray
    P_DB: np.ndarray
    P_DADB: np.ndarray
    P_DAB: np.ndarray
    norm: float

    def __post_init__(self):
        for name in SETUP_COLUMNS:
            object.__setattr__(self, name, as_profile(self.grid, getattr(self, name), name))
        if not self.norm > 0:
            raise DegenerateError(f"P_AB(0) = {self.norm!r}; the configuration has no central intensity")

    def profiles(self):
        return {name: getattr(self, name) for name in SETUP_COLUMNS}

    def normalized(self):
        """Profiles divided by P_AB(0)"""
        return {name: values / self.norm for name, values in self.profiles().items()}


@dataclass(frozen=True)
class TripleSlitProbabilities:
    """Seven triple-slit profiles on a common grid"""
    grid: object
    P_ABC: np.ndarray
    P_AB: np.ndarray
    P_AC: np.ndarray
    P_BC: np.ndarray
    P_A: np.ndarray
    P_B: np.ndarray
    P_C: np.ndarray
    three_path_term_omitted: bool = True

    def __post_init__(self):
        for name in TRIPLE_COLUMNS:
            object.__setattr__(self, name, as_profile(self.grid, getattr(self, name), name))

    def profiles(self):
        return {name: getattr(self, name) for name in TRIPLE_COLUMNS}


def _abs2(z):
    return z.real ** 2 + z.imag ** 2


def central_norm(grid, P_AB):
    """P_AB at the grid point nearest y = 0"""
    return float(P_AB[grid.index_nearest(0.0)])


def perfect_distributions(wc):
    """Born-rule profiles for the five setups: no detector, D_A, D_B, D_A+D_B, and the type II detector"""
    a, b, ab = wc.psi_A, wc.psi_B, wc.psi_AB

    P_AB = _abs2(a + b + ab)
    P_DA = _abs2(a + ab) + _abs2(b)
    P_DB = _abs2(b + ab) + _abs2(a)
    P_DADB = _abs2(a) + _abs2(b) + _abs2(ab)
    P_DAB = _abs2(a + b) + _abs2(ab)

    norm = central_norm(wc.grid, P_AB)
    if not norm > 0:
        raise DegenerateError(f"P_AB(0) = {norm!r}; cannot normalize")
    return SetupDistributions(wc.grid, P_AB, P_DA, P_DB, P_DADB, P_DAB, norm)


def delta1(sd):
    """Δ1 = P_DA - P_DADB (single vs double type I detectors)"""
    return sd.P_DA - sd.P_DADB


def delta2(sd):
    """Δ2 = P_AB - P_DAB (no detector vs type II detector)"""
    return sd.P_AB - sd.P_DAB


def born_parameter(sd):
    """I_AB = P_AB - P_DA - P_DB - P_DAB + 2 P_DADB; zero whenever the Born rule holds"""
    return sd.P_AB - sd.P_DA - sd.P_DB - sd.P_DAB + 2 * sd.P_DADB


def sorkin_parameter(tp):
    """I_ABC = P_ABC - P_AB - P_AC - P_BC + P_A + P_B + P_C"""
    profiles = tp.profiles()
    sizes = {name: values.shape for name, values in profiles.items()}
    if len(set(sizes.values())) != 1 or next(iter(sizes.values())) != (len(tp.grid),):
        raise GridMismatchError(f"triple-slit profiles do not share the grid: {sizes}")
    return (
        tp.P_ABC - tp.P_AB - tp.P_AC - tp.P_BC
        + tp.P_A + tp.P_B + tp.P_C
    )


def triple_slit_probabilities(grid, fields, three_path_term_omitted=True):
    """
    Triple-slit profiles from slit fields {'A','B','C'} and pair fields
    {'AB','AC','BC'}. The three-slit non-classical term is taken as zero.
    """
    a, b, c = fields['A'], fields['B'], fields['C']
    ab, ac, bc = fields['AB'], fields['AC'], fields['BC']
    return TripleSlitProbabilities(
        grid,
        P_ABC=_abs2(a + b + c + ab + ac + bc),
        P_AB=_abs2(a + b + ab),
        P_AC=_abs2(a + c + ac),
        P_BC=_abs2(b + c + bc),
        P_A=_abs2(a),
        P_B=_abs2(b),
        P_C=_abs2(c),
        three_path_term_omitted=three_path_term_omitted,
    )


def build_triple_slit_probabilities(geom, grid, quad, classical_only=False, workers=1):
    """Triple-slit profiles for slits at +d, 0, -d using the double-slit propagators"""
    from slitpaths.geometry import triple_slit_apertures
    from slitpaths.propagators import propagate

    fields = propagate(triple_slit_apertures(geom), geom, grid, quad, classical_only, workers)
    logger.debug(f"Triple-slit fields computed (classical_only={classical_only})")
    return triple_slit_probabilities(grid, fields)
