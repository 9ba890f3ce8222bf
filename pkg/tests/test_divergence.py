import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdfmatch import (
    EmpiricalCdf,
    ThresholdGrid,
    bhattacharyya_distance,
    cdf_to_masses,
    distance,
    ecdf_build,
    kl_divergence,
    l1_cdf_distance,
)
from cdfmatch.divergence import LOG_FLOOR, normalize_kind


def linear_cdf(lo, hi):
    """CDF of the uniform distribution on [lo, hi]."""
    return EmpiricalCdf(np.array([lo, hi]), np.array([0.0, 1.0]), interpolation="linear")


def step_at(value):
    return EmpiricalCdf(np.array([value]), np.array([1.0]), interpolation="step")


def masses_cdf(p0, p1):
    """Step CDF whose masses over the grid {0, 1} are (p0, p1, 0)."""
    return EmpiricalCdf(
        np.array([-0.5, 0.5]), np.array([p0, p0 + p1]), interpolation="step"
    )


GRID01 = ThresholdGrid(np.array([0.0, 1.0]))


def test_masses_of_interior_step():
    masses = cdf_to_masses(step_at(0.5), GRID01)
    assert masses == pytest.approx([0.0, 1.0, 0.0])


def test_masses_of_uniform_increments():
    grid = ThresholdGrid(np.array([0.0, 0.5, 1.0]))
    masses = cdf_to_masses(linear_cdf(0.0, 1.0), grid)
    assert masses == pytest.approx([0.0, 0.5, 0.5, 0.0])


@settings(max_examples=50, deadline=None)
@given(
    data=st.lists(st.floats(-100, 100), min_size=1, max_size=25),
    lo=st.floats(-200, 200),
    width=st.floats(0.1, 100),
    size=st.integers(2, 40),
)
def test_masses_always_sum_to_one(data, lo, width, size):
    cdf = ecdf_build(data)
    grid = ThresholdGrid(np.linspace(lo, lo + width, size))
    masses = cdf_to_masses(cdf, grid)
    assert abs(masses.sum() - 1.0) <= 1e-12


def test_l1_identity_is_zero():
    f = linear_cdf(0.0, 1.0)
    grid = ThresholdGrid(np.linspace(-0.1, 1.1, 100))
    assert l1_cdf_distance(f, f, grid) == 0.0


def test_l1_shifted_uniform_equals_shift():
    f = linear_cdf(0.0, 1.0)
    g = linear_cdf(0.25, 1.25)
    from cdfmatch import make_grid

    grid = make_grid(f, g, 400)
    assert l1_cdf_distance(f, g, grid) == pytest.approx(0.25, abs=0.01)


def test_l1_offset_unit_steps():
    grid = ThresholdGrid(np.linspace(-0.1, 1.1, 121))
    assert l1_cdf_distance(step_at(0.0), step_at(1.0), grid) == pytest.approx(1.0, abs=0.02)


def test_l1_unscaled_is_raw_threshold_sum():
    f = linear_cdf(0.0, 1.0)
    g = linear_cdf(0.25, 1.25)
    grid = ThresholdGrid(np.linspace(-0.1, 1.4, 100))
    raw = l1_cdf_distance(f, g, grid, scaled=False)
    assert l1_cdf_distance(f, g, grid) == pytest.approx(raw * grid.spacing)


def test_bhattacharyya_identical_masses_is_zero():
    f = masses_cdf(0.5, 0.5)
    assert bhattacharyya_distance(f, f, GRID01) == pytest.approx(0.0, abs=1e-12)


def test_bhattacharyya_disjoint_hits_log_floor():
    f = masses_cdf(1.0, 0.0)
    g = masses_cdf(0.0, 1.0)
    assert bhattacharyya_distance(f, g, GRID01) == pytest.approx(-math.log(LOG_FLOOR))
    assert bhattacharyya_distance(f, g, GRID01) == pytest.approx(27.631, abs=0.001)


def test_bhattacharyya_hand_value():
    f = masses_cdf(0.5, 0.5)
    g = masses_cdf(0.9, 0.1)
    expected = -math.log(math.sqrt(0.45) + math.sqrt(0.05))
    assert bhattacharyya_distance(f, g, GRID01) == pytest.approx(expected, abs=1e-12)
    assert bhattacharyya_distance(f, g, GRID01) == pytest.approx(0.1116, abs=1e-4)


def test_bhattacharyya_literal_cdf_mode_differs():
    f = linear_cdf(0.0, 1.0)
    grid = ThresholdGrid(np.linspace(-0.1, 1.1, 200))
    # raw CDF values are not masses: the literal form is nonzero even at f = f
    assert bhattacharyya_distance(f, f, grid, mode="cdf") != pytest.approx(0.0, abs=1e-6)
    assert bhattacharyya_distance(f, f, grid, mode="mass") == pytest.approx(0.0, abs=1e-12)


def test_kl_identity_is_zero():
    f = masses_cdf(0.3, 0.7)
    assert kl_divergence(f, f, GRID01) == pytest.approx(0.0, abs=1e-12)


def test_kl_hand_value():
    f = masses_cdf(0.5, 0.5)
    g = masses_cdf(0.25, 0.75)
    expected = 0.5 * math.log(2.0) + 0.5 * math.log(2.0 / 3.0)
    assert kl_divergence(f, g, GRID01) == pytest.approx(expected, abs=1e-12)
    assert kl_divergence(f, g, GRID01) == pytest.approx(0.1438, abs=1e-4)


def test_kl_zero_mass_terms_vanish():
    f = masses_cdf(1.0, 0.0)
    g = masses_cdf(0.5, 0.5)
    assert kl_divergence(f, g, GRID01) == pytest.approx(math.log(2.0), abs=1e-12)


def test_kl_is_asymmetric():
    f = masses_cdf(0.9, 0.1)
    g = masses_cdf(0.5, 0.5)
    assert kl_divergence(f, g, GRID01) != pytest.approx(kl_divergence(g, f, GRID01), abs=1e-6)


def test_symmetric_distances():
    f = masses_cdf(0.8, 0.2)
    g = masses_cdf(0.4, 0.6)
    assert bhattacharyya_distance(f, g, GRID01) == pytest.approx(
        bhattacharyya_distance(g, f, GRID01)
    )
    assert l1_cdf_distance(f, g, GRID01) == pytest.approx(l1_cdf_distance(g, f, GRID01))


def test_dispatch_wasserstein_equals_l1():
    f = linear_cdf(0.0, 1.0)
    g = linear_cdf(0.5, 1.5)
    grid = ThresholdGrid(np.linspace(-0.2, 1.7, 300))
    assert distance("wasserstein1", f, g, grid) == distance("l1_cdf", f, g, grid)


def test_dispatch_identity_zeros():
    f = masses_cdf(0.5, 0.5)
    for kind in ("l1_cdf", "bhattacharyya", "kl", "wasserstein1"):
        assert distance(kind, f, f, GRID01) == pytest.approx(0.0, abs=1e-12)


def test_dispatch_rejects_unknown_kind():
    with pytest.raises(ValueError):
        normalize_kind("energy")
    assert normalize_kind("l1") == "l1_cdf"


def test_grid_refinement_is_cauchy():
    from cdfmatch import make_grid

    f = linear_cdf(0.0, 1.0)
    g = linear_cdf(0.3, 1.6)
    values = {
        size: l1_cdf_distance(f, g, make_grid(f, g, size)) for size in (50, 200, 400)
    }
    assert abs(values[400] - values[200]) < abs(values[400] - values[50])


@settings(max_examples=40, deadline=None)
@given(
    a=st.lists(st.floats(-50, 50), min_size=1, max_size=15),
    b=st.lists(st.floats(-50, 50), min_size=1, max_size=15),
)
def test_all_distances_nonnegative(a, b):
    f = ecdf_build(a)
    g = ecdf_build(b)
    grid = ThresholdGrid(np.linspace(-60, 60, 50))
    for kind in ("l1_cdf", "bhattacharyya", "kl", "wasserstein1"):
        assert distance(kind, f, g, grid) >= 0.0
