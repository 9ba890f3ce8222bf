import numpy as np
import pytest

from cdfmatch import ConfusionMatrix, confusion, psnr, report, rmse, ssim
from cdfmatch import data_loss


def test_rmse_examples():
    assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(np.sqrt(25.0 / 2.0))


def test_rmse_squared_equals_data_loss():
    a = [1.0, 2.0, 5.0]
    b = [0.5, 2.5, 4.0]
    assert rmse(a, b) ** 2 == pytest.approx(data_loss(a, b))


def test_rmse_symmetry():
    a = np.array([1.0, 4.0, 2.0])
    b = np.array([0.0, 1.0, 7.0])
    assert rmse(a, b) == rmse(b, a)


def test_rmse_length_mismatch():
    with pytest.raises(ValueError):
        rmse([1.0], [1.0, 2.0])


def test_psnr_identical_images_capped():
    image = np.random.default_rng(0).uniform(size=(16, 16))
    assert psnr(image, image) == 99.0


def test_psnr_hand_values():
    # MSE of exactly 1 at peak 255 gives 10*log10(255^2) ~ 48.13 dB
    ref = np.zeros((10, 10))
    test_img = np.full((10, 10), 1.0)
    assert psnr(ref, test_img, peak=255.0) == pytest.approx(
        10.0 * np.log10(255.0**2), abs=1e-6
    )
    # uniform error of 0.1 at peak 1 is exactly 20 dB
    uniform_err = np.full((8, 8), 0.1)
    assert psnr(np.zeros((8, 8)), uniform_err, peak=1.0) == pytest.approx(20.0)


def test_psnr_monotone_in_noise_amplitude():
    gen = np.random.default_rng(1)
    ref = gen.uniform(0.3, 0.7, size=(32, 32))
    field = gen.normal(size=(32, 32))
    values = [psnr(ref, ref + amp * field) for amp in (0.02, 0.05, 0.1)]
    assert values[0] > values[1] > values[2]


def test_psnr_dimension_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


def test_ssim_self_is_one():
    image = np.random.default_rng(2).uniform(size=(20, 20))
    assert ssim(image, image) == pytest.approx(1.0)


def test_ssim_degrades_with_noise():
    gen = np.random.default_rng(3)
    ref = gen.uniform(0.2, 0.8, size=(32, 32))
    field = gen.normal(size=(32, 32))
    small = ssim(ref, np.clip(ref + 0.02 * field, 0, 1))
    large = ssim(ref, np.clip(ref + 0.15 * field, 0, 1))
    assert large < small


def naive_ssim(reference, test, peak=1.0, window=8):
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    h, w = reference.shape
    values = []
    for r in range(h - window + 1):
        for c in range(w - window + 1):
            a = reference[r : r + window, c : c + window]
            b = test[r : r + window, c : c + window]
            mu_a, mu_b = a.mean(), b.mean()
            var_a = (a**2).mean() - mu_a**2
            var_b = (b**2).mean() - mu_b**2
            cov = (a * b).mean() - mu_a * mu_b
            values.append(
                ((2 * mu_a * mu_b + c1) * (2 * cov + c2))
                / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))
            )
    return float(np.mean(values))


def test_ssim_matches_naive_double_loop():
    rows = np.linspace(0, 1, 32)[:, None]
    cols = np.linspace(0, 1, 32)[None, :]
    gradient = 0.5 * rows + 0.5 * cols
    shifted = np.roll(gradient, 1, axis=1)
    assert ssim(gradient, shifted) == pytest.approx(naive_ssim(gradient, shifted), abs=1e-8)


def test_ssim_too_small_image():
    with pytest.raises(ValueError):
        ssim(np.zeros((4, 4)), np.zeros((4, 4)))


def test_confusion_hand_counts():
    true = np.array([1, 1, 1, 0, 0, 0, 0, 0, 0, 0])
    pred = np.array([1, 1, 0, 1, 0, 0, 0, 0, 0, 0])
    cm = confusion(true, pred)
    assert cm == ConfusionMatrix(tp=2, fp=1, fn=1, tn=6)
    scores = report(cm)
    assert scores.accuracy == pytest.approx(0.8)
    assert scores.precision == pytest.approx(2.0 / 3.0)
    assert scores.recall == pytest.approx(2.0 / 3.0)
    assert scores.f1 == pytest.approx(2.0 / 3.0)


def test_perfect_prediction_scores():
    true = np.array([0, 1, 1, 0, 1])
    scores = report(confusion(true, true))
    assert (scores.accuracy, scores.precision, scores.recall, scores.f1) == (1, 1, 1, 1)


def test_all_positive_predictor():
    true = np.array([1] * 5 + [0] * 5)
    pred = np.ones(10, dtype=int)
    scores = report(confusion(true, pred))
    assert scores.recall == 1.0
    assert scores.precision == pytest.approx(0.5)
    assert scores.accuracy == pytest.approx(0.5)


def test_report_values_within_unit_interval():
    gen = np.random.default_rng(4)
    for _ in range(20):
        true = gen.integers(0, 2, 30)
        pred = gen.integers(0, 2, 30)
        scores = report(confusion(true, pred))
        for value in scores.to_dict().values():
            assert 0.0 <= value <= 1.0


def test_accuracy_invariant_under_sample_permutation():
    gen = np.random.default_rng(5)
    true = gen.integers(0, 2, 40)
    pred = gen.integers(0, 2, 40)
    perm = gen.permutation(40)
    assert report(confusion(true, pred)).accuracy == report(
        confusion(true[perm], pred[perm])
    ).accuracy


def test_macro_averages_match_by_hand():
    cm = ConfusionMatrix(tp=2, fp=1, fn=1, tn=6)
    scores = report(cm)
    neg_precision = 6 / 7
    neg_recall = 6 / 7
    assert scores.macro_precision == pytest.approx((2 / 3 + neg_precision) / 2)
    assert scores.macro_recall == pytest.approx((2 / 3 + neg_recall) / 2)


def test_f1_zero_when_undefined():
    scores = report(ConfusionMatrix(tp=0, fp=0, fn=5, tn=5))
    assert scores.precision == 0.0
    assert scores.f1 == 0.0
