import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdfmatch import (
    EmpiricalCdf,
    InputDistribution,
    Marginal,
    RngStream,
    ThresholdGrid,
    ecdf_build,
    ecdf_eval,
    make_grid,
    mc_cdf,
)


def brute_force_fraction(data, query):
    return sum(1 for v in data if v <= query) / len(data)


def test_counting_semantics_at_a_point():
    cdf = ecdf_build([1.0, 2.0, 3.0])
    assert ecdf_eval(cdf, 2.0) == pytest.approx(2.0 / 3.0)


def test_single_observation_boundaries():
    cdf = ecdf_build([5.0])
    assert ecdf_eval(cdf, 4.9) == 0.0
    assert ecdf_eval(cdf, 5.0) == 1.0


def test_step_mode_matches_brute_force_everywhere():
    gen = np.random.default_rng(0)
    data = gen.normal(0, 2, 20)
    cdf = ecdf_build(data)
    queries = gen.uniform(-6, 6, 50)
    for q in queries:
        assert ecdf_eval(cdf, q) == pytest.approx(brute_force_fraction(data, q), abs=0)


def test_far_tails():
    cdf = ecdf_build([0.0, 1.0, 2.0])
    assert ecdf_eval(cdf, -1e9) == 0.0
    assert ecdf_eval(cdf, 1e9) == 1.0


def test_linear_interpolation():
    cdf = EmpiricalCdf(np.array([0.0, 1.0]), np.array([0.0, 1.0]), interpolation="linear")
    assert ecdf_eval(cdf, 0.25) == pytest.approx(0.25)


def test_both_modes_agree_at_knots():
    data = [0.3, 1.1, 2.5, 2.9]
    step = ecdf_build(data, interpolation="step")
    linear = ecdf_build(data, interpolation="linear")
    for v in data:
        assert ecdf_eval(step, v) == ecdf_eval(linear, v)


def test_empty_input_rejected():
    with pytest.raises(ValueError, match="no observations"):
        ecdf_build([])


def test_vector_evaluation_matches_scalars():
    cdf = ecdf_build([1.0, 2.0, 4.0])
    queries = np.array([-1.0, 1.5, 4.0, 9.0])
    batch = cdf.evaluate(queries)
    assert np.array_equal(batch, [cdf.evaluate(float(q)) for q in queries])


@settings(max_examples=50, deadline=None)
@given(
    data=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30),
    y1=st.floats(-1e7, 1e7),
    y2=st.floats(-1e7, 1e7),
)
def test_monotone_nondecreasing(data, y1, y2):
    cdf = ecdf_build(data)
    lo, hi = sorted((y1, y2))
    assert ecdf_eval(cdf, lo) <= ecdf_eval(cdf, hi)


def uniform1d():
    return InputDistribution([Marginal.uniform(0.0, 1.0)])


def test_mc_cdf_constant_predictor_is_unit_step():
    cdf = mc_cdf(lambda X: np.full(X.shape[0], 3.0), uniform1d(), 200, RngStream(5))
    assert cdf.evaluate(2.999) == 0.0
    assert cdf.evaluate(3.0) == 1.0


def test_mc_cdf_identity_matches_uniform_cdf():
    cdf = mc_cdf(lambda X: X[:, 0], uniform1d(), 10**5, RngStream(6))
    grid = np.linspace(0.001, 0.999, 400)
    gap = np.abs(cdf.evaluate(grid) - grid)
    assert gap.max() <= 0.01


def test_mc_cdf_retains_sample_for_reuse():
    cdf = mc_cdf(lambda X: X[:, 0], uniform1d(), 500, RngStream(7))
    assert cdf.sample_inputs.shape == (500, 1)
    assert cdf.sample_outputs.shape == (500,)
    assert np.array_equal(cdf.sample_inputs[:, 0], cdf.sample_outputs)


def test_mc_cdf_rejects_nonfinite_predictions():
    def bad_predict(X):
        out = X[:, 0].copy()
        out[:3] = np.nan
        return out

    with pytest.raises(ValueError, match="3 non-finite"):
        mc_cdf(bad_predict, uniform1d(), 100, RngStream(8))


def test_mc_cdf_minimum_sample_count():
    with pytest.raises(ValueError):
        mc_cdf(lambda X: X[:, 0], uniform1d(), 99, RngStream(9))


def test_mc_cdf_convergence_with_sample_size():
    # the sup-gap to the true uniform CDF should shrink from 1e3 to 1e5 draws
    grid = np.linspace(0.001, 0.999, 200)
    wins = 0
    for seed in range(10):
        small = mc_cdf(lambda X: X[:, 0], uniform1d(), 10**3, RngStream(seed, 1))
        large = mc_cdf(lambda X: X[:, 0], uniform1d(), 10**5, RngStream(seed, 2))
        gap_small = np.abs(small.evaluate(grid) - grid).max()
        gap_large = np.abs(large.evaluate(grid) - grid).max()
        wins += gap_large < gap_small
    assert wins >= 9


def test_make_grid_basic_margin():
    f = EmpiricalCdf(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    grid = make_grid(f, f, 3)
    assert grid.thresholds == pytest.approx([-0.05, 0.5, 1.05])


def test_make_grid_degenerate_support_fallback():
    f = EmpiricalCdf(np.array([2.0]), np.array([1.0]))
    grid = make_grid(f, f, 5)
    assert grid.thresholds[0] == pytest.approx(1.0)
    assert grid.thresholds[-1] == pytest.approx(3.0)


def test_make_grid_union_of_supports():
    f = EmpiricalCdf(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    g = EmpiricalCdf(np.array([2.0, 3.0]), np.array([0.0, 1.0]))
    grid = make_grid(f, g, 11)
    assert grid.thresholds[0] == pytest.approx(-0.15)
    assert grid.thresholds[-1] == pytest.approx(3.15)


def test_threshold_grid_validation():
    with pytest.raises(ValueError):
        ThresholdGrid(np.array([1.0]))
    with pytest.raises(ValueError):
        ThresholdGrid(np.array([1.0, 1.0]))


def test_csv_round_trip_exact(tmp_path):
    data = np.random.default_rng(3).normal(0, 1, 40)
    cdf = ecdf_build(data, interpolation="linear")
    path = tmp_path / "cdf.csv"
    cdf.to_csv(path)
    loaded = EmpiricalCdf.from_csv(path)
    assert np.array_equal(loaded.ys, cdf.ys)
    assert np.array_equal(loaded.ps, cdf.ps)


def test_knot_validation():
    with pytest.raises(ValueError):
        EmpiricalCdf(np.array([1.0, 1.0]), np.array([0.5, 1.0]))
    with pytest.raises(ValueError):
        EmpiricalCdf(np.array([0.0, 1.0]), np.array([0.9, 0.5]))
