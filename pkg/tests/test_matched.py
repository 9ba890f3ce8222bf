import numpy as np
import pytest
from sklearn.base import clone

from cdfmatch import DistributionMatchedSVC, DistributionMatchedSVR


def noisy_linear(n=80, seed=0):
    gen = np.random.default_rng(seed)
    X = gen.uniform(0, 1, size=(n, 2))
    y = X @ np.array([2.0, -1.0]) + gen.normal(0, 0.1, n)
    return X, y


def test_matched_svr_fit_predict():
    X, y = noisy_linear()
    model = DistributionMatchedSVR(budget=6, random_state=0).fit(X, y)
    pred = model.predict(X)
    assert pred.shape == (80,)
    assert np.all(np.isfinite(pred))
    assert model.best_params_ is not None
    assert len(model.result_.history) == 6


def test_matched_svr_reproducible():
    X, y = noisy_linear(seed=1)
    a = DistributionMatchedSVR(budget=6, random_state=3).fit(X, y)
    b = DistributionMatchedSVR(budget=6, random_state=3).fit(X, y)
    assert a.best_params_ == b.best_params_
    assert np.array_equal(a.predict(X), b.predict(X))


def test_matched_svr_fits_reasonably():
    X, y = noisy_linear(seed=2)
    model = DistributionMatchedSVR(budget=12, random_state=0).fit(X, y)
    residual = model.predict(X) - y
    assert np.sqrt(np.mean(residual**2)) < 0.5 * y.std()


def test_matched_svc_fit_predict():
    gen = np.random.default_rng(3)
    X = np.vstack([gen.normal(1.5, 0.4, size=(30, 2)), gen.normal(-1.5, 0.4, size=(30, 2))])
    y = np.array([1] * 30 + [0] * 30)
    model = DistributionMatchedSVC(budget=6, random_state=0).fit(X, y)
    pred = model.predict(X)
    assert set(np.unique(pred)) <= {0, 1}
    assert np.mean(pred == y) >= 0.9


def test_matched_svc_rejects_bad_labels():
    X = np.random.default_rng(4).normal(size=(10, 2))
    with pytest.raises(ValueError):
        DistributionMatchedSVC(budget=6).fit(X, np.arange(10))


def test_estimators_cloneable():
    model = DistributionMatchedSVR(alpha=0.5, beta=0.5, budget=10)
    twin = clone(model)
    assert twin.get_params()["alpha"] == 0.5
    assert twin.get_params()["budget"] == 10
