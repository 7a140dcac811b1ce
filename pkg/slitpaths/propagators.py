"""
SlitPaths - Propagators
Free, classical-path and non-classical-path propagators by quadrature

Classical paths run source -> slit -> screen; non-classical paths run
source -> slit P -> slit Q -> screen. Each has an exact form and the
Fraunhofer / stationary-phase form used for the reported profiles.
The constant gamma = exp[ik(S+D)]/SD and the powers of i are kept as written.
"""

import cmath
import math
import time
import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

import numpy as np

from slitpaths.errors import ConvergenceError
from slitpaths.geometry import Aperture, PropagatorMode
from slitpaths.quadrature import aperture_rule

logger = logging.getLogger(__name__)

# Rows per evaluation chunk. Fixed, so results never depend on the worker count.
CHUNK_ROWS = 512

I_THREE_HALVES = cmath.exp(0.75j * math.pi)


def free_propagator(r1, r2, k):
    """(k/2πi) e^{ik|r1-r2|} / |r1-r2| for 2D points r1, r2"""
    distance = math.hypot(r2[0] - r1[0], r2[1] - r1[1])
    if distance == 0:
        raise ValueError(f"free propagator needs distinct points, got {r1!r} twice")
    return (k / (2j * math.pi)) * cmath.exp(1j * k * distance) / distance


def _aperture(slit, geom):
    return slit if isinstance(slit, Aperture) else geom.aperture(slit)


def _gamma(geom):
    S, D = geom.source_distance, geom.screen_distance
    return cmath.exp(1j * geom.wavenumber * (S + D)) / (S * D)


# ---------------------------------------------------------------------------
# Quadrature rules
# ---------------------------------------------------------------------------

def classical_rule(aperture, geom, y_reach, quad):
    """Rule across one slit for screen points with |y_D| <= y_reach"""
    slope = aperture.reach / geom.source_distance + (y_reach + aperture.reach) / geom.screen_distance
    return aperture_rule(aperture, slope, geom.wavelength, quad)


def nonclassical_rules(first, second, geom, y_reach, quad):
    """Rules for the entry slit and the exit slit of an inter-slit path"""
    rule_first = aperture_rule(
        first, first.reach / geom.source_distance + 1.0, geom.wavelength, quad
    )
    rule_second = aperture_rule(
        second, 1.0 + (y_reach + second.reach) / geom.screen_distance, geom.wavelength, quad
    )
    return rule_first, rule_second


# ---------------------------------------------------------------------------
# Evaluation on a fixed rule
# ---------------------------------------------------------------------------

def _classical_exact_values(geom, y, rule):
    k, S, D = geom.wavenumber, geom.source_distance, geom.screen_distance
    ys = rule.nodes
    l1 = np.hypot(ys, S)
    excess1 = ys ** 2 / (l1 + S)
    dy = y[:, None] - ys[None, :]
    l2 = np.hypot(dy, D)
    excess2 = dy ** 2 / (l2 + D)
    integrand = np.exp(1j * k * (excess1[None, :] + excess2)) / (l1[None, :] * l2)
    prefactor = -(k / (2j * math.pi)) ** 2 * cmath.exp(1j * k * (S + D))
    return prefactor * rule.integrate(integrand)


def _classical_fraunhofer_values(geom, y, rule):
    k, S, D = geom.wavenumber, geom.source_distance, geom.screen_distance
    ys = rule.nodes
    quadratic = ys ** 2 * (1 / (2 * S) + 1 / (2 * D))
    phase = k * (quadratic[None, :] - y[:, None] * ys[None, :] / D)
    total = rule.integrate(np.exp(1j * phase))
    prefactor = -_gamma(geom) * (k / (2j * math.pi)) ** 2
    return prefactor * np.exp(1j * k * y ** 2 / (2 * D)) * total


def _entry_sum_exact(geom, rule_first, rule_second):
    # sum over entry-slit nodes, leaving a function of the exit-slit node
    k, S = geom.wavenumber, geom.source_distance
    yp, yq = rule_first.nodes, rule_second.nodes
    l1 = np.hypot(yp, S)
    entry = rule_first.weights * np.exp(1j * k * (yp ** 2 / (l1 + S))) / l1
    l2 = np.abs(yq[None, :] - yp[:, None])
    return np.sum(entry[:, None] * np.exp(1j * k * l2) / l2, axis=0)


def _entry_sum_stationary(geom, rule_first, rule_second):
    k, S = geom.wavenumber, geom.source_distance
    yp, yq = rule_first.nodes, rule_second.nodes
    entry = rule_first.weights * np.exp(1j * k * yp ** 2 / (2 * S))
    l2 = np.abs(yq[None, :] - yp[:, None])
    return np.sum(entry[:, None] * np.exp(1j * k * l2) / np.sqrt(l2), axis=0)


def _nonclassical_exact_values(geom, y, rule_second, entry_sum):
    k, S, D = geom.wavenumber, geom.source_distance, geom.screen_distance
    yq = rule_second.nodes
    dy = y[:, None] - yq[None, :]
    l3 = np.hypot(dy, D)
    exit_leg = np.exp(1j * k * (dy ** 2 / (l3 + D))) / l3
    prefactor = (k / (2j * math.pi)) ** 3 * cmath.exp(1j * k * (S + D))
    return prefactor * rule_second.integrate(exit_leg * entry_sum[None, :])


def _nonclassical_stationary_values(geom, y, rule_second, entry_sum):
    k, D = geom.wavenumber, geom.screen_distance
    yq = rule_second.nodes
    phase = k * (yq[None, :] ** 2 / (2 * D) - y[:, None] * yq[None, :] / D)
    total = rule_second.integrate(np.exp(1j * phase) * entry_sum[None, :])
    prefactor = _gamma(geom) * I_THREE_HALVES * (k / (2 * math.pi)) ** 2.5
    return prefactor * np.exp(1j * k * y ** 2 / (2 * D)) * total


class _ClassicalPlan:
    """Fixed rule for one slit, evaluated row-chunk by row-chunk"""

    def __init__(self, aperture, geom, y_reach, quad):
        self.geom = geom
        self.rule = classical_rule(aperture, geom, y_reach, quad)
        self.exact = quad.mode is PropagatorMode.EXACT

    def __call__(self, y):
        if self.exact:
            return _classical_exact_values(self.geom, y, self.rule)
        return _classical_fraunhofer_values(self.geom, y, self.rule)


class _NonclassicalPlan:
    """Fixed rules for an ordered slit pair; the entry-slit sum is shared by all rows"""

    def __init__(self, first, second, geom, y_reach, quad):
        self.geom = geom
        rule_first, self.rule_second = nonclassical_rules(first, second, geom, y_reach, quad)
        self.exact = quad.mode is PropagatorMode.EXACT
        if self.exact:
            self.entry_sum = _entry_sum_exact(geom, rule_first, self.rule_second)
        else:
            self.entry_sum = _entry_sum_stationary(geom, rule_first, self.rule_second)

    def __call__(self, y):
        if self.exact:
            return _nonclassical_exact_values(self.geom, y, self.rule_second, self.entry_sum)
        return _nonclassical_stationary_values(self.geom, y, self.rule_second, self.entry_sum)


# ---------------------------------------------------------------------------
# Convergence checking
# ---------------------------------------------------------------------------

def relative_change(value, reference):
    """max |value - reference| / max |reference| (0 when the reference vanishes)"""
    value = np.asarray(value)
    reference = np.asarray(reference)
    scale = np.max(np.abs(reference))
    if scale == 0:
        return float(np.max(np.abs(value)))
    return float(np.max(np.abs(value - reference)) / scale)


def _checked(what, evaluate, quad):
    value = evaluate(quad)
    if quad.verify:
        refined = evaluate(quad.refined())
        change = relative_change(value, refined)
        logger.debug(f"{what}: self-convergence {change:.3e}")
        if change > quad.tolerance:
            raise ConvergenceError(what, change, quad.tolerance)
    return value


def _as_points(y_d):
    y = np.asarray(y_d, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if not np.all(np.isfinite(y)):
        raise ValueError("screen positions must be finite")
    return y, scalar


def _unwrap(values, scalar):
    return complex(values[0]) if scalar else values


# ---------------------------------------------------------------------------
# Public propagators
# ---------------------------------------------------------------------------

def classical_propagator_exact(slit, geom, y_d, quad):
    """-(k/2πi)^2 ∫ dy e^{ik(l1+l2)}/(l1 l2) over the slit opening"""
    aperture = _aperture(slit, geom)
    y, scalar = _as_points(y_d)
    reach = float(np.max(np.abs(y)))

    def evaluate(spec):
        rule = classical_rule(aperture, geom, reach, spec)
        return _classical_exact_values(geom, y, rule)

    return _unwrap(_checked(f"K_{aperture.name} (exact)", evaluate, quad), scalar)


def classical_propagator_fraunhofer(slit, geom, y_d, quad):
    """-γ(k/2πi)^2 ∫ dy e^{ik(y²/2S + (y_D-y)²/2D)} over the slit opening"""
    aperture = _aperture(slit, geom)
    y, scalar = _as_points(y_d)
    reach = float(np.max(np.abs(y)))

    def evaluate(spec):
        rule = classical_rule(aperture, geom, reach, spec)
        return _classical_fraunhofer_values(geom, y, rule)

    return _unwrap(_checked(f"K_{aperture.name} (fraunhofer)", evaluate, quad), scalar)


def _nonclassical(first, second, geom, y_d, quad, exact):
    p = _aperture(first, geom)
    q = _aperture(second, geom)
    if p == q:
        raise ValueError(f"non-classical paths need two different slits, got {p.name} twice")
    y, scalar = _as_points(y_d)
    reach = float(np.max(np.abs(y)))

    def evaluate(spec):
        rule_first, rule_second = nonclassical_rules(p, q, geom, reach, spec)
        if exact:
            entry = _entry_sum_exact(geom, rule_first, rule_second)
            return _nonclassical_exact_values(geom, y, rule_second, entry)
        entry = _entry_sum_stationary(geom, rule_first, rule_second)
        return _nonclassical_stationary_values(geom, y, rule_second, entry)

    form = "exact" if exact else "stationary"
    return _unwrap(_checked(f"K_{p.name}{q.name} ({form})", evaluate, quad), scalar)


def nonclassical_propagator_exact(first, second, geom, y_d, quad):
    """(k/2πi)^3 ∬ dy_P dy_Q e^{ik(l1+l2+l3)}/(l1 l2 l3), l2 = |y_Q - y_P|"""
    return _nonclassical(first, second, geom, y_d, quad, exact=True)


def nonclassical_propagator_stationary(first, second, geom, y_d, quad):
    """γ i^{3/2} (k/2π)^{5/2} ∬ dy_P dy_Q |y_Q-y_P|^{-1/2} e^{ik(...)}"""
    return _nonclassical(first, second, geom, y_d, quad, exact=False)


def classical_propagator(slit, geom, y_d, quad):
    """Classical propagator in the form selected by quad.mode"""
    if quad.mode is PropagatorMode.EXACT:
        return classical_propagator_exact(slit, geom, y_d, quad)
    return classical_propagator_fraunhofer(slit, geom, y_d, quad)


def nonclassical_propagator(first, second, geom, y_d, quad):
    """Non-classical propagator in the form selected by quad.mode"""
    if quad.mode is PropagatorMode.EXACT:
        return nonclassical_propagator_exact(first, second, geom, y_d, quad)
    return nonclassical_propagator_stationary(first, second, geom, y_d, quad)


# ---------------------------------------------------------------------------
# Whole-grid evaluation
# ---------------------------------------------------------------------------

def _evaluate_plans(plans, y, workers):
    """Evaluate every plan on every fixed-size row chunk of y"""
    chunks = [slice(start, min(start + CHUNK_ROWS, y.size)) for start in range(0, y.size, CHUNK_ROWS)]
    results = {name: np.empty(y.size, dtype=complex) for name in plans}
    tasks = [(name, chunk) for name in plans for chunk in chunks]

    def run(task):
        name, chunk = task
        results[name][chunk] = plans[name](y[chunk])

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, tasks))
    else:
        for task in tasks:
            run(task)
    return results


def _propagate_once(apertures, geom, y, reach, quad, classical_only, workers):
    plans = {a.name: _ClassicalPlan(a, geom, reach, quad) for a in apertures}
    ordered_pairs = []
    if not classical_only:
        for p, q in combinations(apertures, 2):
            ordered_pairs.append((p.name + q.name, p, q))
            ordered_pairs.append((q.name + p.name, q, p))
        for name, p, q in ordered_pairs:
            plans[name] = _NonclassicalPlan(p, q, geom, reach, quad)

    values = _evaluate_plans(plans, y, workers)

    fields = {a.name: values[a.name] for a in apertures}
    for p, q in combinations(apertures, 2):
        key = p.name + q.name
        if classical_only:
            fields[key] = np.zeros(y.size, dtype=complex)
        else:
            # both slit orderings of the inter-slit path
            fields[key] = values[p.name + q.name] + values[q.name + p.name]
    return fields


def propagate(apertures, geom, grid, quad, classical_only=False, workers=1):
    """
    Fields of every slit and every slit pair on the screen grid.
    Returns {'A': ψ_A, 'B': ψ_B, 'AB': ψ_AB, ...}; pair fields sum both orderings
    and are zero when classical_only is set.
    """
    y = grid.y_values
    reach = grid.reach
    start = time.time()

    def evaluate(spec):
        return _propagate_once(apertures, geom, y, reach, spec, classical_only, workers)

    fields = evaluate(quad)
    if quad.verify:
        refined = evaluate(quad.refined())
        for key in fields:
            change = relative_change(fields[key], refined[key])
            if change > quad.tolerance:
                raise ConvergenceError(f"psi_{key}", change, quad.tolerance)

    logger.info(
        f"Propagated {len(apertures)} slits over {len(grid)} screen points "
        f"({quad.mode.value}, {quad.nodes_per_wavelength} nodes/wavelength) "
        f"in {time.time() - start:.2f}s"
    )
    return fields


def compute_wave_components(geom, grid, quad, classical_only=False, workers=1):
    """ψ_A = K_A, ψ_B = K_B, ψ_AB = K_AB + K_BA on every grid point"""
    from slitpaths.detection import WaveComponents

    fields = propagate(geom.apertures(), geom, grid, quad, classical_only, workers)
    return WaveComponents(grid, fields['A'], fields['B'], fields['AB'])


def sample_indices(n_points, samples):
    """Deterministic spread of sample indices including both grid ends"""
    return np.unique(np.linspace(0, n_points - 1, min(samples, n_points)).round().astype(int))


def self_convergence(apertures, geom, grid, quad, samples=5, classical_only=False):
    """
    Largest relative change of any field under node doubling, measured on a
    spread of grid points. Grid ends are always sampled, so the quadrature
    rules match the full-grid ones.
    """
    sub = grid.subset(sample_indices(len(grid), samples))
    coarse = _propagate_once(apertures, geom, sub.y_values, grid.reach, quad, classical_only, 1)
    fine = _propagate_once(apertures, geom, sub.y_values, grid.reach, quad.refined(), classical_only, 1)
    change = max(relative_change(coarse[key], fine[key]) for key in coarse)
    logger.debug(f"Self-convergence over {len(sub)} sample points: {change:.3e}")
    return change
