"""Per-pixel background model of past WATER/GROUND observations.

Each pixel keeps ``K`` binary samples. A new WATER observation is flagged as
flood when fewer than ``k_min`` of the samples are WATER. Pixels that are not
flagged then overwrite one sample, chosen by a counter-based hash of
``(seed, frame_index, pixel)``; flagged pixels leave the model alone so flood
water never leaks into the background.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _parallel
from .errors import DimensionMismatch, EmptyWarmup, FrameError, LengthMismatch, ValidationError
from .raster import (
    WATER,
    BinaryMap,
    DetectorParams,
    FloodMask,
    SarFrame,
    SequenceManifest,
    check_same_shape,
    manifest_problems,
)
from .rng import slot_indices
from .segmentation import segment_water


@dataclass(frozen=True, eq=False)
class BackgroundModel:
    """``samples`` has shape ``(K, height, width)`` with values in {WATER, GROUND}."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.uint8, copy=True)
        if s.ndim != 3 or s.shape[0] < 1:
            raise ValueError(f"samples must be (K, H, W) with K >= 1, got {s.shape}")
        if not np.isin(s, (0, 1)).all():
            raise ValueError("samples must be 0 or 1")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def K(self) -> int:
        return self.samples.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape[1:]

    def water_count(self) -> np.ndarray:
        return self.K - self.samples.sum(axis=0, dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, BackgroundModel):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    __hash__ = None


def init_background(warmup: Sequence[BinaryMap], K: int) -> BackgroundModel:
    """Temporal median of the warm-up maps, copied into all ``K`` slots.

    On binary data the median is a majority vote; an exact tie goes to GROUND.
    """
    if len(warmup) == 0:
        raise EmptyWarmup("need at least one warm-up map")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    h, w = check_same_shape(*warmup)
    n_water = np.zeros((h, w), dtype=np.int64)
    for m in warmup:
        n_water += m.values == WATER
    median = np.where(2 * n_water > len(warmup), WATER, 1 - WATER).astype(np.uint8)
    return BackgroundModel(np.broadcast_to(median, (K, h, w)))


def classify_frame(
    model: BackgroundModel, seg: BinaryMap, k_min: int, frame_index: int = 0
) -> FloodMask:
    """Flag WATER pixels whose model holds fewer than ``k_min`` WATER samples."""
    if not 1 <= k_min <= model.K:
        raise ValueError(f"k_min must be in [1, {model.K}], got {k_min}")
    if seg.shape != model.shape:
        raise DimensionMismatch(f"segmentation {seg.shape} vs model {model.shape}")
    flood = (seg.values == WATER) & (model.water_count() < k_min)
    return FloodMask(flood.astype(np.uint8), frame_index)


def update_model(
    model: BackgroundModel, seg: BinaryMap, flood: FloodMask, frame_index: int, seed: int
) -> BackgroundModel:
    """Write ``seg`` into one hashed slot at every non-flooded pixel."""
    if not (seg.shape == flood.shape == model.shape):
        raise DimensionMismatch(
            f"model {model.shape}, segmentation {seg.shape}, flood {flood.shape}"
        )
    slots = slot_indices(seed, frame_index, model.shape, model.K)
    rows, cols = np.nonzero(flood.values == 0)
    samples = np.array(model.samples, copy=True)
    samples[slots[rows, cols], rows, cols] = seg.values[rows, cols]
    return BackgroundModel(samples)


@dataclass
class DetectorState:
    """Streaming detector. Feed maps in sequence order with :meth:`step`.

    ``frame_cursor`` counts frames consumed; the next frame has 1-based index
    ``frame_cursor + 1``. ``model`` stays ``None`` until ``n_init`` warm-up
    maps have been seen.
    """

    params: DetectorParams
    rng_seed: int = 0
    model: BackgroundModel | None = None
    frame_cursor: int = 0
    _warmup: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.params.check()

    @property
    def initialized(self) -> bool:
        return self.model is not None

    def step(self, seg: BinaryMap) -> FloodMask | None:
        """Consume one segmentation map; returns None for warm-up frames."""
        p = self.params
        index = self.frame_cursor + 1
        if self.model is None:
            if self._warmup:
                check_same_shape(self._warmup[0], seg)
            self._warmup.append(seg)
            self.frame_cursor = index
            if len(self._warmup) == p.n_init:
                self.model = init_background(self._warmup, p.K)
                self._warmup = []
            return None
        flood = classify_frame(self.model, seg, p.k_min, index)
        self.model = update_model(self.model, seg, flood, index, self.rng_seed)
        self.frame_cursor = index
        return flood

    def step_frame(self, frame: SarFrame) -> FloodMask | None:
        return self.step(segment_water(frame, self.params))


def run_detector(
    manifest: SequenceManifest,
    frames: Iterable[BinaryMap | SarFrame] | None = None,
    *,
    emit_warmup_zeros: bool = False,
    threads: int | None = None,
) -> tuple[list[FloodMask], DetectorState]:
    """Run the whole sequence: warm-up, then classify and update per frame.

    ``frames`` may hold segmentation maps or raw frames; when omitted the
    rasters listed in the manifest are read. Raw frames are segmented on up
    to ``threads`` workers (default ``$FLOODVIBE_THREADS``); the output does
    not depend on the worker count.
    """
    problems = manifest_problems(manifest)
    if problems:
        raise ValidationError(problems)
    params = manifest.params
    if frames is None:
        from .fileio import read_raster

        frames = (read_raster(ref.path) for ref in manifest.frames)
    frames = list(frames)
    if len(frames) != len(manifest.frames):
        raise LengthMismatch(f"{len(frames)} frames for {len(manifest.frames)} manifest entries")

    def prepare(item):
        i, f = item
        try:
            return f if isinstance(f, BinaryMap) else segment_water(f, params)
        except Exception as exc:
            raise FrameError(i, exc) from exc

    state = DetectorState(params, manifest.seed)
    masks = []
    n_threads = _parallel.thread_count(threads)
    for i, seg in enumerate(_parallel.ordered_map(prepare, enumerate(frames, 1), n_threads), 1):
        try:
            mask = state.step(seg)
        except Exception as exc:
            raise FrameError(i, exc) from exc
        if mask is not None:
            masks.append(mask)
        elif emit_warmup_zeros:
            masks.append(FloodMask(np.zeros(seg.shape, dtype=np.uint8), i))
    return masks, state
