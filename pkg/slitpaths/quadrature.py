"""
SlitPaths - Quadrature
Composite Gauss-Legendre and Simpson rules over slit openings

Panels are laid out symmetrically about the interval center, so the rule on
a mirrored interval is the exact negation of the original rule. Mirror
symmetry between slit A and slit B then holds to rounding of the sums alone.
"""

import math
import logging
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from slitpaths.geometry import QuadratureScheme

logger = logging.getLogger(__name__)

# Gauss-Legendre nodes per panel
PANEL_ORDER = 4


class QuadratureRule(NamedTuple):
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values, axis=-1):
        """Weighted sum of sampled integrand values along `axis`"""
        values = np.moveaxis(np.asarray(values), axis, -1)
        return np.sum(values * self.weights, axis=-1)


@lru_cache(maxsize=None)
def _reference_rule(order):
    nodes, weights = leggauss(order)  # interval [-1, 1]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_count(span, wavelength, nodes_per_wavelength):
    """
    Panels needed so each one covers at most wavelength/nodes_per_wavelength
    of path-length variation, given the total variation `span` over the interval.
    """
    return max(1, math.ceil(nodes_per_wavelength * span / wavelength))


def gauss_legendre_rule(lower, upper, panels, order=PANEL_ORDER):
    """Composite Gauss-Legendre rule with `panels` equal panels on [lower, upper]"""
    ref_nodes, ref_weights = _reference_rule(order)
    center = (lower + upper) / 2
    h = (upper - lower) / panels
    offsets = (np.arange(panels) - (panels - 1) / 2) * h
    nodes = center + (offsets[:, None] + (h / 2) * ref_nodes[None, :])
    weights = np.broadcast_to((h / 2) * ref_weights, (panels, order))
    return QuadratureRule(nodes.ravel(), np.array(weights).ravel())


def simpson_rule(lower, upper, intervals):
    """Composite Simpson 1/3 rule; `intervals` is rounded up to an even count"""
    intervals = max(2, intervals + intervals % 2)
    center = (lower + upper) / 2
    h = (upper - lower) / intervals
    nodes = center + (np.arange(intervals + 1) - intervals / 2) * h
    weights = np.ones(intervals + 1)
    weights[1:-1:2] = 4
    weights[2:-1:2] = 2
    weights *= h / 3
    return QuadratureRule(nodes, weights)


def composite_rule(lower, upper, span, wavelength, spec):
    """Rule on [lower, upper] resolving a phase that varies by `span` (meters of path)"""
    panels = panel_count(span, wavelength, spec.nodes_per_wavelength)
    if spec.scheme is QuadratureScheme.SIMPSON:
        rule = simpson_rule(lower, upper, panels)
    else:
        rule = gauss_legendre_rule(lower, upper, panels)
    logger.debug(
        f"{spec.scheme.value} rule on [{lower:.4e}, {upper:.4e}]: "
        f"{panels} panels, {rule.nodes.size} nodes"
    )
    return rule


def aperture_rule(aperture, slope, wavelength, spec):
    """Rule across a slit opening whose path length changes at most `slope` per meter of y"""
    return composite_rule(aperture.lower, aperture.upper, aperture.width * slope, wavelength, spec)
