"""
SlitPaths
Path-integral simulation of the double slit with which-way detectors:
classical and non-classical (inter-slit) paths, perfect and imperfect
detector distributions, the I_AB Born-rule test and the Sorkin parameter.
"""

import logging

__version__ = '1.0.0'

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(verbosity=0):
    """WARNING by default, INFO for one -v, DEBUG for two or more"""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
    return level


from slitpaths.errors import (  # noqa: E402
    ConfigError, ConvergenceError, DegenerateError, GeometryError, GridMismatchError,
    PrecisionWarning, ReportError, SlitPathsError, WindowError,
)
from slitpaths.geometry import (  # noqa: E402
    Aperture, PropagatorMode, QuadratureScheme, QuadratureSpec, ScreenGrid, Slit,
    SlitGeometry, make_geometry, make_grid, triple_slit_apertures,
)
from slitpaths.propagators import (  # noqa: E402
    classical_propagator, classical_propagator_exact, classical_propagator_fraunhofer,
    compute_wave_components, free_propagator, nonclassical_propagator,
    nonclassical_propagator_exact, nonclassical_propagator_stationary, propagate,
    self_convergence,
)
from slitpaths.detection import (  # noqa: E402
    SetupDistributions, TripleSlitProbabilities, WaveComponents, born_parameter,
    build_triple_slit_probabilities, delta1, delta2, perfect_distributions,
    sorkin_parameter, triple_slit_probabilities,
)
from slitpaths.imperfect import (  # noqa: E402
    DetectorOverlapModel, ImperfectDistributions, Setup, born_parameter_from_imperfect,
    delta_av, delta_av_pairs, efficiency_threshold, imperfect_from_model,
    imperfect_from_perfect, imperfect_general, invert_imperfect,
)
from slitpaths.config import RunConfig, load_config  # noqa: E402
