"""
Composite quadrature rules
"""

import cmath
import math

import numpy as np
import pytest

from slitpaths.geometry import QuadratureSpec
from slitpaths.quadrature import (
    PANEL_ORDER, composite_rule, gauss_legendre_rule, panel_count, simpson_rule,
)


def test_single_panel_is_exact_for_degree_seven():
    rule = gauss_legendre_rule(0.5, 2.0, panels=1)
    values = rule.nodes ** 7 - 3 * rule.nodes ** 2 + 1
    exact = (2.0 ** 8 - 0.5 ** 8) / 8 - (2.0 ** 3 - 0.5 ** 3) + 1.5
    assert rule.nodes.size == PANEL_ORDER
    assert rule.integrate(values) == pytest.approx(exact, rel=1e-13)


def test_weights_sum_to_interval_length():
    rule = gauss_legendre_rule(-3.0, 4.0, panels=9)
    assert np.sum(rule.weights) == pytest.approx(7.0, rel=1e-14)
    assert np.all(np.diff(rule.nodes) > 0)


def test_mirrored_interval_gives_negated_rule():
    rule = gauss_legendre_rule(0.75e-6, 1.25e-6, panels=7)
    mirror = gauss_legendre_rule(-1.25e-6, -0.75e-6, panels=7)
    assert np.array_equal(mirror.nodes, -rule.nodes[::-1])
    assert np.array_equal(mirror.weights, rule.weights[::-1])


def test_simpson_rounds_to_even_and_integrates_cubics():
    rule = simpson_rule(0.0, 1.0, 3)
    assert rule.nodes.size == 5
    assert rule.integrate(rule.nodes ** 3) == pytest.approx(0.25, rel=1e-14)


def test_panel_count():
    assert panel_count(1.0, 1.0, 16) == 16
    assert panel_count(0.0, 1.0, 16) == 1
    assert panel_count(875e-9, 810e-9, 16) == 18


def test_oscillatory_integral_against_closed_form():
    """Test a many-wavelength exponential integral against its closed form"""
    wavelength = 810e-9
    k = 2 * math.pi / wavelength
    length = 10.25 * wavelength
    exact = (cmath.exp(1j * k * length) - 1) / (1j * k)

    rule = composite_rule(0.0, length, length, wavelength, QuadratureSpec())
    value = rule.integrate(np.exp(1j * k * rule.nodes))
    assert abs(value - exact) / abs(exact) < 1e-10

    rule = composite_rule(0.0, length, length, wavelength, QuadratureSpec(scheme='simpson'))
    value = rule.integrate(np.exp(1j * k * rule.nodes))
    assert abs(value - exact) / abs(exact) < 1e-3


def test_integrate_along_axis():
    rule = gauss_legendre_rule(0.0, 1.0, panels=2)
    rows = np.vstack([np.ones_like(rule.nodes), rule.nodes])
    assert rule.integrate(rows) == pytest.approx([1.0, 0.5], rel=1e-14)
    assert rule.integrate(rows.T, axis=0) == pytest.approx([1.0, 0.5], rel=1e-14)
