"""Grid data types shared by every stage of the pipeline.

Grids are numpy arrays indexed ``[row, col]`` with the origin at the top-left.
Backscatter is linear power, never dB. Binary maps use ``WATER = 0`` and
``GROUND = 1`` so that a water observation is a zero, as in the flood rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidFrame, MissingChannel

WATER = 0
GROUND = 1
CHANNEL_LABELS = ("VV", "VH")
UINT64_MAX = 2**64 - 1


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SarFrame:
    """One acquisition: ``channels`` has shape ``(C, height, width)``."""

    channels: np.ndarray
    channel_labels: tuple[str, ...]
    timestamp: datetime | None = None
    frame_id: str = ""

    def __post_init__(self):
        chans = np.asarray(self.channels)
        if chans.ndim == 2:
            chans = chans[None]
        if chans.ndim != 3:
            raise InvalidFrame(f"channels must be (C, H, W), got shape {chans.shape}")
        if chans.dtype.kind != "f":
            chans = chans.astype(np.float32)
        labels = tuple(self.channel_labels)
        if not 1 <= len(labels) <= 2:
            raise InvalidFrame(f"expected 1 or 2 channels, got {len(labels)}")
        if len(labels) != chans.shape[0]:
            raise InvalidFrame(f"{len(labels)} labels for {chans.shape[0]} planes")
        if len(set(labels)) != len(labels):
            raise InvalidFrame(f"duplicate channel labels {labels}")
        for lab in labels:
            if lab not in CHANNEL_LABELS:
                raise InvalidFrame(f"unknown channel label {lab!r}")
        if chans.shape[1] == 0 or chans.shape[2] == 0:
            raise InvalidFrame("empty grid")
        if not np.all(np.isfinite(chans)):
            raise InvalidFrame("non-finite backscatter value")
        if np.any(chans < 0):
            raise InvalidFrame("negative backscatter value (expected linear power)")
        object.__setattr__(self, "channels", _frozen(chans))
        object.__setattr__(self, "channel_labels", labels)

    @property
    def height(self) -> int:
        return self.channels.shape[1]

    @property
    def width(self) -> int:
        return self.channels.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.channels.shape[1:]

    def __eq__(self, other):
        if not isinstance(other, SarFrame):
            return NotImplemented
        return (
            self.channel_labels == other.channel_labels
            and self.timestamp == other.timestamp
            and self.frame_id == other.frame_id
            and self.channels.dtype == other.channels.dtype
            and np.array_equal(self.channels, other.channels)
        )

    __hash__ = None


def _binary_grid(values, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise InvalidFrame(f"{what} must be 2-D, got shape {arr.shape}")
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidFrame(f"{what} values must be 0 or 1")
    return _frozen(arr.astype(np.uint8, copy=False))


@dataclass(frozen=True, eq=False)
class BinaryMap:
    """Per-pixel WATER (0) / GROUND (1) classification."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _binary_grid(self.values, "BinaryMap"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def water(self) -> np.ndarray:
        return self.values == WATER

    def __eq__(self, other):
        if not isinstance(other, BinaryMap):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FloodMask:
    """Per-pixel flood flag (1 = flooded) for sequence position ``frame_index``."""

    values: np.ndarray
    frame_index: int

    def __post_init__(self):
        object.__setattr__(self, "values", _binary_grid(self.values, "FloodMask"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FloodMask):
            return NotImplemented
        return self.frame_index == other.frame_index and np.array_equal(
            self.values, other.values
        )

    __hash__ = None


@dataclass(frozen=True)
class DetectorParams:
    """Segmentation and background-model settings.

    Defaults are the values the method was tuned with on Sentinel-1 VV data.
    No VH defaults exist; set ``channel`` and ``threshold`` together.
    """

    kernel_size: int = 8
    threshold: float = 0.03
    num_components: int = 20
    K: int = 5
    k_min: int = 1
    n_init: int = 30
    channel: str = "VV"

    def problems(self) -> list[tuple[str, str]]:
        """Return ``(field, message)`` for every violated invariant."""
        out = []

        def is_int(v):
            return isinstance(v, (int, np.integer)) and not isinstance(v, bool)

        for name, lo in (("kernel_size", 1), ("num_components", 1), ("K", 1), ("n_init", 1)):
            v = getattr(self, name)
            if not is_int(v):
                out.append((name, f"must be an integer, got {v!r}"))
            elif v < lo:
                out.append((name, f"must be >= {lo}, got {v}"))
        t = self.threshold
        if isinstance(t, bool) or not isinstance(t, (int, float, np.floating, np.integer)):
            out.append(("threshold", f"must be a number, got {t!r}"))
        elif not (math.isfinite(t) and t > 0):
            out.append(("threshold", f"must be finite and > 0, got {t}"))
        if not is_int(self.k_min):
            out.append(("k_min", f"must be an integer, got {self.k_min!r}"))
        elif self.k_min < 1:
            out.append(("k_min", f"must be >= 1, got {self.k_min}"))
        elif is_int(self.K) and self.k_min > self.K:
            out.append(("k_min", f"must be <= K ({self.K}), got {self.k_min}"))
        if self.channel not in CHANNEL_LABELS:
            out.append(("channel", f"must be one of {CHANNEL_LABELS}, got {self.channel!r}"))
        return out

    def check(self) -> "DetectorParams":
        probs = self.problems()
        if probs:
            raise ValueError("; ".join(f"{f}: {m}" for f, m in probs))
        return self


@dataclass(frozen=True)
class FrameRef:
    frame_id: str
    path: Path
    timestamp: datetime


@dataclass(frozen=True)
class SequenceManifest:
    frames: tuple[FrameRef, ...]
    params: DetectorParams = field(default_factory=DetectorParams)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))


def extract_channel(frame: SarFrame, label: str) -> np.ndarray:
    """Return the (read-only) plane for polarization ``label``."""
    try:
        idx = frame.channel_labels.index(label)
    except ValueError:
        raise MissingChannel(
            f"channel {label!r} not in frame {frame.frame_id!r} {frame.channel_labels}"
        ) from None
    return frame.channels[idx]


def check_same_shape(*grids: np.ndarray | BinaryMap | FloodMask) -> tuple[int, int]:
    shapes = {tuple(np.shape(getattr(g, "values", g))) for g in grids}
    if len(shapes) != 1:
        raise DimensionMismatch(f"grid shapes differ: {sorted(shapes)}")
    return shapes.pop()


def manifest_problems(manifest: SequenceManifest) -> list[str]:
    """Invariant violations checkable without touching the frame files."""
    out = []
    p = manifest.params
    for name, msg in p.problems():
        out.append(f"params.{name}: {msg}")
    seed = manifest.seed
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or not 0 <= seed <= UINT64_MAX:
        out.append(f"seed: must be an unsigned 64-bit integer, got {seed!r}")
    n = len(manifest.frames)
    if isinstance(p.n_init, (int, np.integer)) and n < p.n_init + 1:
        out.append(f"frame count < n_init+1 ({n} < {p.n_init + 1})")
    seen = {}
    for ref in manifest.frames:
        if ref.frame_id in seen:
            out.append(f"duplicate frame_id {ref.frame_id!r}")
        seen[ref.frame_id] = ref
    for prev, cur in zip(manifest.frames, manifest.frames[1:]):
        if not cur.timestamp > prev.timestamp:
            out.append(
                f"non-monotonic timestamps: {prev.frame_id!r} ({prev.timestamp.isoformat()}) "
                f"then {cur.frame_id!r} ({cur.timestamp.isoformat()})"
            )
    return out


def validate_sequence(manifest: SequenceManifest, load=None) -> list[str]:
    """List every reason ``manifest`` cannot be run. Empty means valid.

    Each frame is loaded (``load`` defaults to :func:`floodvibe.fileio.read_raster`)
    to check that it parses and that all frames agree on shape and channels.
    """
    if load is None:
        from .fileio import read_raster as load

    out = manifest_problems(manifest)
    reference = None
    for ref in manifest.frames:
        try:
            frame = load(ref.path)
        except OSError as exc:
            out.append(f"frame {ref.frame_id!r}: cannot read {ref.path}: {exc.strerror or exc}")
            continue
        except Exception as exc:
            out.append(f"frame {ref.frame_id!r}: cannot load {ref.path}: {exc}")
            continue
        layout = (frame.shape, frame.channel_labels)
        if reference is None:
            reference = (ref.frame_id, layout)
            if manifest.params.channel in CHANNEL_LABELS and manifest.params.channel not in frame.channel_labels:
                out.append(
                    f"frame {ref.frame_id!r}: channel {manifest.params.channel!r} missing "
                    f"(has {frame.channel_labels})"
                )
        elif layout != reference[1]:
            (h, w), labs = layout
            (h0, w0), labs0 = reference[1]
            out.append(
                f"frame {ref.frame_id!r}: layout {h}x{w} {labs} differs from "
                f"frame {reference[0]!r} {h0}x{w0} {labs0}"
            )
    return out


def as_maps(grids: Sequence) -> list[BinaryMap]:
    return [g if isinstance(g, BinaryMap) else BinaryMap(g) for g in grids]
