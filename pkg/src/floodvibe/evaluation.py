"""Pixel-wise scoring of flood masks against reference masks."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, LengthMismatch
from .raster import FloodMask


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )

    def as_dict(self) -> dict:
        return asdict(self)


def _grid(m) -> np.ndarray:
    return np.asarray(getattr(m, "values", m)).astype(bool)


def frame_counts(pred, truth) -> ConfusionCounts:
    p, t = _grid(pred), _grid(truth)
    if p.shape != t.shape:
        raise DimensionMismatch(f"prediction {p.shape} vs truth {t.shape}")
    tp = int(np.count_nonzero(p & t))
    fp = int(np.count_nonzero(p & ~t))
    fn = int(np.count_nonzero(~p & t))
    return ConfusionCounts(tp, fp, fn, p.size - tp - fp - fn)


def confusion_counts(pred: Sequence, truth: Sequence) -> ConfusionCounts:
    """Sum per-pixel counts over paired frames.

    When both sides carry ``frame_index`` (FloodMask), the indices must agree.
    """
    if len(pred) != len(truth):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(truth)} references")
    total = ConfusionCounts()
    for p, t in zip(pred, truth):
        if isinstance(p, FloodMask) and isinstance(t, FloodMask) and p.frame_index != t.frame_index:
            raise LengthMismatch(f"frame index {p.frame_index} paired with {t.frame_index}")
        total = total + frame_counts(p, t)
    return total


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def summary_metrics(c: ConfusionCounts) -> dict[str, float | None]:
    """precision, recall, f1 and iou; ``None`` marks a 0/0 metric."""
    return {
        "precision": _ratio(c.tp, c.tp + c.fp),
        "recall": _ratio(c.tp, c.tp + c.fn),
        "f1": _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn),
        "iou": _ratio(c.tp, c.tp + c.fp + c.fn),
    }


def iou(pred, truth) -> float | None:
    return summary_metrics(frame_counts(pred, truth))["iou"]
