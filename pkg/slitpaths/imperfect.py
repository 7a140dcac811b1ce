"""
SlitPaths - Imperfect Detectors
Finite-efficiency which-way detectors: entangled detector-state overlaps,
the efficiency form, inversion back to perfect distributions, and the
window-averaged distinguishability Δ_av
"""

import math
import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np
from scipy.integrate import trapezoid

from slitpaths.detection import SetupDistributions, born_parameter, central_norm, as_profile
from slitpaths.errors import ConfigError, DegenerateError, PrecisionWarning, WindowError

logger = logging.getLogger(__name__)

# Below this efficiency the 1/n^2 inversion term amplifies noise by more than 1e6
LOW_EFFICIENCY_WARNING = 1e-3

PRIMED_COLUMNS = ('P_DA', 'P_DB', 'P_DADB', 'P_DAB')
DELTA_AV_PROFILES = ('AB', 'DA', 'DB', 'DADB', 'DAB')


class Setup(Enum):
    DA = "DA"
    DB = "DB"
    DADB = "DADB"
    DAB = "DAB"


def check_efficiency(n, allow_zero=True):
    if isinstance(n, bool) or not isinstance(n, (int, float, np.floating)) or not math.isfinite(n):
        raise ConfigError('efficiency', f"expected a number in [0, 1], got {n!r}")
    if not 0 <= n <= 1:
        raise ConfigError('efficiency', f"must lie in [0, 1], got {n!r}")
    if n == 0 and not allow_zero:
        raise DegenerateError("efficiency n = 0 leaves nothing to invert")
    return float(n)


@dataclass(frozen=True)
class DetectorOverlapModel:
    """
    Real detector-state inner products.

    ov_0_DA     <0|D_A>       single detector at A, untriggered vs triggered
    ov_0_DB     <0|D_B>       single detector at B
    ov_DB_DA    <D_B|D_A>     two type I detectors, A-only vs B-only
    ov_DADB_DA  <D_AD_B|D_A>  two type I detectors, both vs A-only
    ov_DADB_DB  <D_AD_B|D_B>  two type I detectors, both vs B-only
    ov_D2_D1    <D_2|D_1>     type II detector, two balls vs one ball
    """
    ov_0_DA: float
    ov_0_DB: float
    ov_DB_DA: float
    ov_DADB_DA: float
    ov_DADB_DB: float
    ov_D2_D1: float
    efficiency: float = None

    def __post_init__(self):
        for name in ('ov_0_DA', 'ov_0_DB', 'ov_DB_DA', 'ov_DADB_DA', 'ov_DADB_DB', 'ov_D2_D1'):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ConfigError(name, f"overlap must lie in [0, 1], got {value!r}")
        if self.efficiency is not None:
            check_efficiency(self.efficiency)

    @classmethod
    def from_efficiency(cls, n):
        """Overlaps of two independent n-efficient detectors"""
        n = check_efficiency(n)
        miss = 1 - n
        return cls(
            ov_0_DA=miss,
            ov_0_DB=miss,
            ov_DB_DA=miss ** 2,
            ov_DADB_DA=miss,
            ov_DADB_DB=miss,
            ov_D2_D1=miss,
            efficiency=n,
        )


@dataclass(frozen=True)
class ImperfectDistributions:
    """Primed (finite-efficiency) distributions"""
    grid: object
    P_DA: np.ndarray
    P_DB: np.ndarray
    P_DADB: np.ndarray
    P_DAB: np.ndarray
    model: DetectorOverlapModel = None

    def __post_init__(self):
        for name in PRIMED_COLUMNS:
            object.__setattr__(self, name, as_profile(self.grid, getattr(self, name), name))

    def profiles(self):
        return {name: getattr(self, name) for name in PRIMED_COLUMNS}


def imperfect_from_perfect(sd, n):
    """Efficiency form: each detector fires with probability n"""
    n = check_efficiency(n)
    miss = 1 - n
    return ImperfectDistributions(
        sd.grid,
        P_DA=n * sd.P_DA + miss * sd.P_AB,
        P_DB=n * sd.P_DB + miss * sd.P_AB,
        P_DADB=n ** 2 * sd.P_DADB + n * miss * (sd.P_DA + sd.P_DB) + miss ** 2 * sd.P_AB,
        P_DAB=n * sd.P_DAB + miss * sd.P_AB,
        model=DetectorOverlapModel.from_efficiency(n),
    )


def imperfect_general(wc, model, setup):
    """Distribution for one detector setup with arbitrary detector-state overlaps"""
    try:
        setup = Setup(setup.value if isinstance(setup, Setup) else setup)
    except ValueError:
        raise ConfigError('setup', f"unknown detector setup {setup!r}") from None

    a, b, ab = wc.psi_A, wc.psi_B, wc.psi_AB
    pa, pb, pab = np.abs(a) ** 2, np.abs(b) ** 2, np.abs(ab) ** 2

    if setup is Setup.DA:
        return (
            np.abs(a + ab) ** 2 + pb
            + 2 * np.real(np.conj(a + ab) * b) * model.ov_0_DA
        )
    if setup is Setup.DB:
        return (
            np.abs(b + ab) ** 2 + pa
            + 2 * np.real(np.conj(b + ab) * a) * model.ov_0_DB
        )
    if setup is Setup.DADB:
        return (
            pa + pb + pab
            + 2 * np.real(
                np.conj(a) * b * model.ov_DB_DA
                + np.conj(a) * ab * model.ov_DADB_DA
                + np.conj(b) * ab * model.ov_DADB_DB
            )
        )
    return (
        pa + pb + pab
        + 2 * np.real(np.conj(a) * b)
        + 2 * np.real(np.conj(a) * ab + np.conj(b) * ab) * model.ov_D2_D1
    )


def imperfect_from_model(wc, model):
    """All four primed distributions from the general overlap forms"""
    return ImperfectDistributions(
        wc.grid,
        P_DA=imperfect_general(wc, model, Setup.DA),
        P_DB=imperfect_general(wc, model, Setup.DB),
        P_DADB=imperfect_general(wc, model, Setup.DADB),
        P_DAB=imperfect_general(wc, model, Setup.DAB),
        model=model,
    )


def invert_imperfect(imp, P_AB, n):
    """Perfect distributions recovered from measured n-efficient ones"""
    n = check_efficiency(n, allow_zero=False)
    if n < LOW_EFFICIENCY_WARNING:
        message = (
            f"inverting at efficiency n = {n:g} amplifies measurement noise "
            f"by {1 / n ** 2:.1e} in P_DADB"
        )
        logger.warning(message)
        warnings.warn(message, PrecisionWarning, stacklevel=2)

    P_AB = as_profile(imp.grid, P_AB, 'P_AB')
    miss = 1 - n
    P_DA = (imp.P_DA - miss * P_AB) / n
    P_DB = (imp.P_DB - miss * P_AB) / n
    P_DADB = (imp.P_DADB + miss ** 2 * P_AB - miss * (imp.P_DA + imp.P_DB)) / n ** 2
    P_DAB = (imp.P_DAB - miss * P_AB) / n

    norm = central_norm(imp.grid, P_AB)
    if not norm > 0:
        raise DegenerateError(f"P_AB(0) = {norm!r}; cannot normalize")
    return SetupDistributions(imp.grid, P_AB, P_DA, P_DB, P_DADB, P_DAB, norm)


def born_parameter_from_imperfect(imp, P_AB, n):
    """I_AB evaluated on distributions measured with n-efficient detectors"""
    return born_parameter(invert_imperfect(imp, P_AB, n))


def delta_av(p, q, grid, y1, y2):
    """(1/(y2-y1)) ∫ |p - q| dy over [y1, y2], trapezoidal on the screen grid"""
    y = grid.y_values
    if not y1 < y2:
        raise WindowError(f"window [{y1:g}, {y2:g}] is empty")
    if y1 < y[0] or y2 > y[-1]:
        raise WindowError(f"window [{y1:g}, {y2:g}] lies outside the grid [{y[0]:g}, {y[-1]:g}]")

    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != y.shape or q.shape != y.shape:
        raise WindowError(f"profiles of shape {p.shape} and {q.shape} do not match the grid")

    inside = (y > y1) & (y < y2)
    ys = np.concatenate(([y1], y[inside], [y2]))
    difference = np.abs(np.interp(ys, y, p) - np.interp(ys, y, q))
    return float(trapezoid(difference, ys) / (y2 - y1))


def delta_av_pairs(P_AB, imp, grid, window):
    """Δ'_av for every pair of {P_AB, P'_DA, P'_DB, P'_DADB, P'_DAB}"""
    profiles = {'AB': np.asarray(P_AB, dtype=float)}
    profiles.update({name[2:]: values for name, values in imp.profiles().items()})
    y1, y2 = window
    return {
        f"dav_{first}_{second}": delta_av(profiles[first], profiles[second], grid, y1, y2)
        for first, second in combinations(DELTA_AV_PROFILES, 2)
    }


def efficiency_threshold(efficiencies, values, level):
    """
    First efficiency at which a Δ'_av curve reaches `level`, interpolating
    linearly between sweep points. None when the curve stays below it.
    """
    order = np.argsort(efficiencies)
    ns = np.asarray(efficiencies, dtype=float)[order]
    vs = np.asarray(values, dtype=float)[order]
    if vs.size == 0:
        return None
    if vs[0] >= level:
        return float(ns[0])
    for i in range(1, vs.size):
        if vs[i - 1] < level <= vs[i]:
            fraction = (level - vs[i - 1]) / (vs[i] - vs[i - 1])
            return float(ns[i - 1] + fraction * (ns[i] - ns[i - 1]))
    return None
