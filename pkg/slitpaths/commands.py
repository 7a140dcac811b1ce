"""
SlitPaths - Commands
Experiment orchestration behind the CLI subcommands. Each command takes a
RunConfig, computes (or reuses) the screen fields, and writes CSV reports.
"""

import logging
from itertools import combinations
from pathlib import Path

import numpy as np

from slitpaths import field_store
from slitpaths.config import PHYSICS_KEYS
from slitpaths.detection import (
    WaveComponents, born_parameter, delta1, delta2, perfect_distributions,
    sorkin_parameter, triple_slit_probabilities,
)
from slitpaths.errors import ConfigError, ConvergenceError, DegenerateError
from slitpaths.field_cache import field_cache
from slitpaths.geometry import PropagatorMode, ScreenGrid, triple_slit_apertures
from slitpaths.imperfect import (
    DELTA_AV_PROFILES, ImperfectDistributions, check_efficiency, delta_av_pairs,
    efficiency_threshold, imperfect_from_perfect, invert_imperfect,
)
from slitpaths.propagators import propagate, self_convergence
from slitpaths.report import header_lines, read_table, write_table

logger = logging.getLogger(__name__)

SIMULATE_COLUMNS = ('y_m', 'P_AB', 'P_DA', 'P_DB', 'P_DADB', 'P_DAB', 'Delta1', 'Delta2', 'I_AB')
SWEEP_COLUMNS = (
    'higher_order', 'n', 'y_m', 'P_AB',
    'P_DA_prime', 'P_DB_prime', 'P_DADB_prime', 'P_DAB_prime',
)
MEASURED_COLUMNS = ('y_m', 'P_AB', 'P_DA_prime', 'P_DB_prime', 'P_DADB_prime', 'P_DAB_prime')
INVERT_COLUMNS = ('y_m', 'P_AB', 'P_DA', 'P_DB', 'P_DADB', 'P_DAB', 'I_AB')
SORKIN_COLUMNS = ('y_m', 'P_ABC', 'P_AB', 'P_AC', 'P_BC', 'P_A', 'P_B', 'P_C', 'I_ABC')

PAIR_NAMES = tuple(f"dav_{first}_{second}" for first, second in combinations(DELTA_AV_PROFILES, 2))

# Efficiencies in a measured file match the requested one to this tolerance
EFFICIENCY_MATCH = 1e-9

EXACT_MODE_NOTE = (
    "mode = exact: psi_AB comes from the double-integral form and is not on the scale "
    "of the classical fields; distributions are for validation only"
)


def summary_path(out):
    """`<out stem>.delta_av.csv` next to the profile file"""
    out = Path(out)
    return out.with_name(f"{out.stem}.delta_av.csv")


def _fields(config, layout, classical_only):
    """Screen fields for 'double' or 'triple' slit layouts, through the field cache"""
    geom = config.geometry()
    grid = config.grid()
    quad = config.quadrature()
    if config.cache_dir:
        # a bad TTL should fail before the fields are computed
        field_store.ttl_hours()
    if quad.mode is PropagatorMode.EXACT and not classical_only:
        logger.warning(EXACT_MODE_NOTE)
    apertures = geom.apertures() if layout == 'double' else triple_slit_apertures(geom)
    suffix = 'classical' if classical_only else 'full'
    key = f"{config.digest(PHYSICS_KEYS)}-{layout}-{suffix}"

    def compute():
        return propagate(apertures, geom, grid, quad, classical_only, config.workers)

    fields = field_cache.get_or_compute(
        key, compute, cache_dir=config.cache_dir,
        meta={'layout': layout, 'classical_only': classical_only, 'n_points': len(grid)},
    )
    return apertures, geom, grid, quad, fields


def _mode_notes(config):
    if config.mode == PropagatorMode.EXACT.value and not config.classical_only:
        return [EXACT_MODE_NOTE]
    return []


def _convergence(config, apertures, geom, grid, quad, classical_only):
    """Self-convergence estimate for the header; above the tolerance it is fatal unless verification is off"""
    estimate = self_convergence(apertures, geom, grid, quad, classical_only=classical_only)
    if config.verify_convergence and estimate > quad.tolerance:
        raise ConvergenceError('self_convergence', estimate, quad.tolerance)
    return estimate


def wave_components(config, classical_only=None):
    """ψ_A, ψ_B, ψ_AB for the configured double slit, with its convergence estimate"""
    if classical_only is None:
        classical_only = config.classical_only
    apertures, geom, grid, quad, fields = _fields(config, 'double', classical_only)
    estimate = _convergence(config, apertures, geom, grid, quad, classical_only)
    return WaveComponents(grid, fields['A'], fields['B'], fields['AB']), estimate


def cmd_simulate(config):
    """Five detector-setup profiles, Δ1, Δ2 and I_AB, normalized to P_AB(0)"""
    wc, estimate = wave_components(config)
    sd = perfect_distributions(wc)
    norm = sd.norm

    columns = {'y_m': wc.grid.y_values}
    columns.update({name: values / norm for name, values in sd.profiles().items()})
    columns['Delta1'] = delta1(sd) / norm
    columns['Delta2'] = delta2(sd) / norm
    columns['I_AB'] = born_parameter(sd) / norm

    header = header_lines('simulate', config, estimate, notes=[
        f"norm_P_AB0 = {norm:.16e}",
        f"classical_only = {str(config.classical_only).lower()}",
    ] + _mode_notes(config))
    return write_table(config.out, columns, header)


def _sweep_blocks(config, wc):
    """(higher_order flag, wave components) pairs the sweep is run over"""
    if config.classical_only:
        return [(0, wc)]
    return [(1, wc), (0, wc.without_nonclassical())]


def cmd_sweep_efficiency(config):
    """
    Primed profiles for every efficiency, with and without the non-classical
    term, plus the Δ'_av summary. Returns (profile path, summary path).
    """
    wc, estimate = wave_components(config)
    norm = perfect_distributions(wc).norm
    grid = wc.grid
    window = config.delta_av_window()

    profile = {name: [] for name in SWEEP_COLUMNS}
    summary = {name: [] for name in ('higher_order', 'n') + PAIR_NAMES}
    curves = {}

    for higher_order, block in _sweep_blocks(config, wc):
        sd = perfect_distributions(block)
        for n in config.efficiencies:
            imp = imperfect_from_perfect(sd, n)
            rows = len(grid)
            profile['higher_order'].append(np.full(rows, higher_order))
            profile['n'].append(np.full(rows, n))
            profile['y_m'].append(grid.y_values)
            profile['P_AB'].append(sd.P_AB / norm)
            for name, values in imp.profiles().items():
                profile[f"{name}_prime"].append(values / norm)

            pairs = delta_av_pairs(sd.P_AB, imp, grid, window)
            summary['higher_order'].append(higher_order)
            summary['n'].append(n)
            for pair in PAIR_NAMES:
                value = pairs[pair] / norm
                summary[pair].append(value)
                curves.setdefault((higher_order, pair), []).append(value)
        logger.info(f"Swept {len(config.efficiencies)} efficiencies (higher_order={higher_order})")

    profile_columns = {name: np.concatenate(parts) for name, parts in profile.items()}
    notes = [
        f"norm_P_AB0 = {norm:.16e}",
        f"window_m = {window[0]:.16e},{window[1]:.16e}",
    ] + _mode_notes(config)
    profile_path = write_table(config.out, profile_columns, header_lines(
        'sweep-efficiency', config, estimate, notes=notes,
    ))

    crossings = [f"threshold = {config.threshold:.16e}"]
    for (higher_order, pair), values in curves.items():
        crossing = efficiency_threshold(config.efficiencies, values, config.threshold)
        shown = 'none' if crossing is None else f"{crossing:.6f}"
        crossings.append(f"crossing higher_order={higher_order} {pair} = {shown}")
    summary_file = write_table(summary_path(config.out), summary, header_lines(
        'sweep-efficiency', config, estimate, notes=notes + crossings,
    ))
    return profile_path, summary_file


def _select_rows(data, n, classical_only):
    """Rows of a sweep profile belonging to efficiency n and the requested block"""
    mask = np.ones(data['y_m'].size, dtype=bool)
    if 'n' in data:
        mask &= np.abs(data['n'] - n) <= EFFICIENCY_MATCH
    if 'higher_order' in data:
        mask &= data['higher_order'] == (0 if classical_only else 1)
    if not mask.any():
        raise ConfigError('efficiency', f"measured file has no rows for n = {n:g}")
    return mask


def cmd_invert(config, measured_path, n):
    """Recover perfect-detector distributions and I_AB from measured primed profiles"""
    n = check_efficiency(n, allow_zero=False)
    _, data = read_table(measured_path, required=MEASURED_COLUMNS)
    mask = _select_rows(data, n, config.classical_only)

    grid = ScreenGrid(data['y_m'][mask])
    P_AB = data['P_AB'][mask]
    imp = ImperfectDistributions(
        grid,
        P_DA=data['P_DA_prime'][mask],
        P_DB=data['P_DB_prime'][mask],
        P_DADB=data['P_DADB_prime'][mask],
        P_DAB=data['P_DAB_prime'][mask],
    )
    sd = invert_imperfect(imp, P_AB, n)

    columns = {'y_m': grid.y_values}
    columns.update(sd.profiles())
    columns['I_AB'] = born_parameter(sd)
    logger.info(f"Inverted {len(grid)} rows of {measured_path} at n = {n:g}")

    header = header_lines('invert', config, notes=[
        f"measured = {Path(measured_path).name}",
        f"efficiency = {n!r}",
    ])
    return write_table(config.out, columns, header)


def cmd_sorkin(config):
    """Triple-slit profiles and the Sorkin parameter, normalized to P_ABC(0)"""
    apertures, geom, grid, quad, fields = _fields(config, 'triple', config.classical_only)
    estimate = _convergence(config, apertures, geom, grid, quad, config.classical_only)
    tp = triple_slit_probabilities(grid, fields)

    norm = float(tp.P_ABC[grid.index_nearest(0.0)])
    if not norm > 0:
        raise DegenerateError(f"P_ABC(0) = {norm!r}; cannot normalize")

    columns = {'y_m': grid.y_values}
    columns.update({name: values / norm for name, values in tp.profiles().items()})
    columns['I_ABC'] = sorkin_parameter(tp) / norm

    header = header_lines('sorkin', config, estimate, notes=[
        f"norm_P_ABC0 = {norm:.16e}",
        "psi_ABC = 0 (three-slit non-classical term omitted)",
        f"classical_only = {str(config.classical_only).lower()}",
    ] + _mode_notes(config))
    return write_table(config.out, columns, header)
