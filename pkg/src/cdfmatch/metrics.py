"""Evaluation metrics: regression error, image quality, classification scores."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PSNR_CAP_DB = 99.0
SSIM_WINDOW = 8


def rmse(y_true, y_pred) -> float:
    y_true = np.asarray(y_true, dtype=float).ravel()
    y_pred = np.asarray(y_pred, dtype=float).ravel()
    if y_true.size == 0 or y_true.shape != y_pred.shape:
        raise ValueError("inputs must be equal-length non-empty vectors")
    return float(np.sqrt(np.mean((y_true - y_pred) ** 2)))


def psnr(reference, test, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB, capped at 99 for identical images."""
    reference = np.asarray(reference, dtype=float)
    test = np.asarray(test, dtype=float)
    if reference.shape != test.shape:
        raise ValueError("images must have identical dimensions")
    if peak <= 0:
        raise ValueError("peak must be positive")
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(peak**2 / mse), PSNR_CAP_DB)


def ssim(reference, test, peak: float = 1.0) -> float:
    """Mean structural similarity over 8x8 uniform sliding windows (stride 1).

    Window statistics are population moments; constants are the usual
    C1 = (0.01 peak)^2 and C2 = (0.03 peak)^2.
    """
    reference = np.asarray(reference, dtype=float)
    test = np.asarray(test, dtype=float)
    if reference.shape != test.shape:
        raise ValueError("images must have identical dimensions")
    if reference.ndim != 2 or min(reference.shape) < SSIM_WINDOW:
        raise ValueError(f"images must be 2-D and at least {SSIM_WINDOW} pixels per side")

    win = (SSIM_WINDOW, SSIM_WINDOW)
    rw = np.lib.stride_tricks.sliding_window_view(reference, win)
    tw = np.lib.stride_tricks.sliding_window_view(test, win)
    mu_r = rw.mean(axis=(-2, -1))
    mu_t = tw.mean(axis=(-2, -1))
    var_r = (rw**2).mean(axis=(-2, -1)) - mu_r**2
    var_t = (tw**2).mean(axis=(-2, -1)) - mu_t**2
    cov = (rw * tw).mean(axis=(-2, -1)) - mu_r * mu_t

    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    values = ((2 * mu_r * mu_t + c1) * (2 * cov + c2)) / (
        (mu_r**2 + mu_t**2 + c1) * (var_r + var_t + c2)
    )
    return float(values.mean())


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class ClassificationReport:
    """Positive-class scores plus macro averages over both classes."""

    accuracy: float
    precision: float
    recall: float
    f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }


def confusion(labels_true, labels_pred) -> ConfusionMatrix:
    """Counts over 0/1 labels with 1 as the positive class."""
    labels_true = np.asarray(labels_true).ravel()
    labels_pred = np.asarray(labels_pred).ravel()
    if labels_true.size == 0 or labels_true.shape != labels_pred.shape:
        raise ValueError("inputs must be equal-length non-empty vectors")
    pos = labels_true == 1
    pred_pos = labels_pred == 1
    return ConfusionMatrix(
        tp=int(np.sum(pos & pred_pos)),
        fp=int(np.sum(~pos & pred_pos)),
        fn=int(np.sum(pos & ~pred_pos)),
        tn=int(np.sum(~pos & ~pred_pos)),
    )


def _safe_ratio(num: int, den: int) -> float:
    return num / den if den > 0 else 0.0


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def report(cm: ConfusionMatrix) -> ClassificationReport:
    precision = _safe_ratio(cm.tp, cm.tp + cm.fp)
    recall = _safe_ratio(cm.tp, cm.tp + cm.fn)
    neg_precision = _safe_ratio(cm.tn, cm.tn + cm.fn)
    neg_recall = _safe_ratio(cm.tn, cm.tn + cm.fp)
    return ClassificationReport(
        accuracy=_safe_ratio(cm.tp + cm.tn, cm.total),
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        macro_precision=(precision + neg_precision) / 2.0,
        macro_recall=(recall + neg_recall) / 2.0,
        macro_f1=(_f1(precision, recall) + _f1(neg_precision, neg_recall)) / 2.0,
    )
