import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from percolab import gw
from percolab.errors import (
    DegenerateDenominator,
    InvalidProbability,
    NotSupercriticalWarning,
    SprinkleTooLarge,
    ValidationError,
)


def test_cubic_closed_form():
    # d=3: q = (1/4 + 3q/4)^2 has roots 1 and 1/9
    sol = gw.solve(3, 0.75)
    assert sol.q == pytest.approx(1 / 9, abs=1e-12)
    assert sol.y == pytest.approx(26 / 27, abs=1e-12)
    assert sol.x == pytest.approx(13 / 18, abs=1e-12)
    assert gw.survival_y(3, 0.75) == pytest.approx(26 / 27, abs=1e-12)
    assert gw.site_survival_x(3, 0.75) == pytest.approx(13 / 18, abs=1e-12)


def test_subcritical_and_edges():
    assert gw.solve(4, 0.2).q == 1.0 and gw.solve(4, 0.2).x == 0.0
    assert gw.solve(4, 1 / 3).subcritical  # critical: (d-1)p = 1
    s = gw.solve(5, 1.0)
    assert s.q == 0.0 and s.y == 1.0 and s.x == 1.0
    assert gw.solve(4, 0.0).x == 0.0


@pytest.mark.parametrize("d, p", [(1, 0.5), (3, -0.1), (3, 1.5), (3, float("nan"))])
def test_invalid_inputs(d, p):
    with pytest.raises(ValidationError):
        gw.solve(d, p)


def test_invalid_probability_type():
    with pytest.raises(InvalidProbability):
        gw.solve(3, 2.0)


@settings(max_examples=200, deadline=None)
@given(d=st.integers(3, 200), p=st.floats(0.0, 1.0))
def test_fixed_point_properties(d, p):
    sol = gw.solve(d, p)
    assert 0.0 <= sol.q <= 1.0
    assert abs(sol.q - (1 - p + p * sol.q) ** (d - 1)) <= 1e-10
    assert 0.0 <= sol.x <= sol.y <= 1.0
    if (d - 1) * p > 1:
        assert sol.q < 1.0


def test_smallest_root_without_acceleration():
    a = gw.solve(10, 0.2, accelerate=False)
    b = gw.solve(10, 0.2)
    assert a.q == pytest.approx(b.q, abs=1e-11)


def test_modes_report_epsilon():
    assert gw.solve(16, 1.5 / 16, mode="growing").epsilon == pytest.approx(0.5)
    assert gw.solve(16, 1.5 / 15, mode="constant").epsilon == pytest.approx(0.5)


def test_asymptotic_root():
    y = gw.solve_y_asymptotic(1.0)
    assert 1 - y == pytest.approx(math.exp(-2 * y), abs=1e-12)
    assert y == pytest.approx(0.796812, abs=1e-5)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert gw.solve_y_asymptotic(0.0) == 0.0
    assert any(issubclass(w.category, NotSupercriticalWarning) for w in caught)
    # near criticality y ~ 2 eps
    assert gw.solve_y_asymptotic(1e-4) == pytest.approx(2e-4, rel=1e-3)


def test_sprinkle_split():
    p1, p2 = gw.sprinkle_split(0.1, 0.5, 10)
    assert p2 == 0.05 and (1 - p1) * (1 - p2) == pytest.approx(0.9, rel=1e-14)
    assert gw.sprinkle_split(0.1, 0.0, 10) == (0.1, 0.0)
    with pytest.raises(SprinkleTooLarge):
        gw.sprinkle_split(0.01, 1.0, 10)


def test_thresholds():
    n = 10**6
    th = gw.small_component_threshold("growing", {"eps": 0.5}, n)
    assert th.value == pytest.approx(400 * math.log(n))
    th = gw.small_component_threshold("constant", {"alpha": 2.0, "delta": 0.0}, n)
    assert th.value == pytest.approx(18 * math.log(n))
    with pytest.raises(DegenerateDenominator):
        gw.small_component_threshold("constant", {"alpha": 1.0, "delta": 0.1}, n)


def test_tail_bound():
    tb = gw.component_tail_bound(0.5, 10, 1.0)
    assert tb.value == 1.0 and not tb.in_scope  # raw > 1 and k below 50/eps^2
    tb = gw.component_tail_bound(0.5, 10, 5000.0)
    assert tb.raw == pytest.approx(3 * 0.5 * 5000 * 10 * math.exp(-0.25 * 5000 / 25))
    assert tb.in_scope and 0 <= tb.value <= 1
    assert not gw.component_tail_bound(0.5, 10, 5000.0, t=1000.0).in_scope


def test_helpers():
    assert gw.sparsity_vertex_expansion_factor(10, 0.25) == pytest.approx(6.0)
    assert gw.cycle_free_radius(0.25) == pytest.approx(0.25)
    assert gw.counterexample_expectation(1e6, 16, 2) == pytest.approx(2.51e-5, rel=0.01)


def test_reference_values():
    # site survival at the hypercube experiment points
    for d, x in [(16, 0.05317), (14, 0.06044), (12, 0.06995)]:
        assert gw.site_survival_x(d, 1.5 / d) == pytest.approx(x, abs=1e-5)
