"""Water segmentation: boxcar despeckle, threshold, small-component pruning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidKernel
from .raster import GROUND, WATER, BinaryMap, DetectorParams, SarFrame, extract_channel


def window_bounds(n: int, kernel_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Half-open ``[lo, hi)`` window of every index along an axis of length ``n``.

    The window covers ``i - (k-1)//2 .. i + k//2`` clipped to the axis, so an
    even kernel reaches one further forward than backward.
    """
    back, fwd = (kernel_size - 1) // 2, kernel_size // 2
    idx = np.arange(n)
    lo = np.clip(idx - back, 0, n)
    hi = np.clip(idx + fwd + 1, 0, n)
    return lo, hi


def _window_sums(x: np.ndarray, kernel_size: int, axis: int) -> tuple[np.ndarray, np.ndarray]:
    n = x.shape[axis]
    lo, hi = window_bounds(n, kernel_size)
    shape = list(x.shape)
    shape[axis] = 1
    prefix = np.concatenate([np.zeros(shape), np.cumsum(x, axis=axis)], axis=axis)
    sums = np.take(prefix, hi, axis=axis) - np.take(prefix, lo, axis=axis)
    return sums, hi - lo


def boxcar_filter(plane, kernel_size: int) -> np.ndarray:
    """Mean over a ``kernel_size`` square window, float64 output.

    Windows are cut at the image border and averaged over the pixels that
    remain, so edges are not darkened. Computed separably from prefix sums.
    """
    if isinstance(kernel_size, bool) or not isinstance(kernel_size, (int, np.integer)) or kernel_size < 1:
        raise InvalidKernel(f"kernel_size must be an integer >= 1, got {kernel_size!r}")
    x = np.asarray(plane, dtype=np.float64)
    if x.ndim != 2 or x.size == 0:
        raise ValueError(f"expected a non-empty 2-D plane, got shape {x.shape}")
    if kernel_size == 1:
        return x.copy()
    rows, row_counts = _window_sums(x, kernel_size, axis=1)
    sums, col_counts = _window_sums(rows, kernel_size, axis=0)
    out = sums / np.multiply.outer(col_counts, row_counts)
    # prefix-sum differences can step just outside the input range
    return np.clip(out, x.min(), x.max(), out=out)


def threshold_segment(plane, threshold: float) -> BinaryMap:
    """GROUND where ``plane > threshold``, WATER otherwise."""
    if not threshold > 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    return BinaryMap((np.asarray(plane) > threshold).astype(np.uint8))


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    """4-connected components of one class.

    ``labels`` is 0 off-class and ``1..n`` in raster order of each component's
    first pixel. ``counts[i]`` is the size of component ``i`` (``counts[0]`` is 0).
    """

    labels: np.ndarray
    counts: np.ndarray

    @property
    def n_components(self) -> int:
        return len(self.counts) - 1

    @property
    def sizes(self) -> dict[int, int]:
        return {i: int(c) for i, c in enumerate(self.counts) if i}


def _runs(mask: np.ndarray):
    h, w = mask.shape
    padded = np.zeros((h, w + 2), dtype=np.int8)
    padded[:, 1:-1] = mask
    edges = np.diff(padded, axis=1)
    _, starts = np.nonzero(edges == 1)
    _, ends = np.nonzero(edges == -1)
    return starts, ends


def _find_roots(parent: np.ndarray) -> np.ndarray:
    while True:
        nxt = parent[parent]
        if np.array_equal(nxt, parent):
            return parent
        parent = nxt


def label_components(bmap: BinaryMap, target_class: int = WATER) -> ComponentLabeling:
    """Label 4-connected regions of ``target_class`` pixels.

    Pixels are grouped into horizontal runs; runs touching vertically are
    merged with a union-find whose roots are always the lowest run id, which
    is the run holding the component's first pixel in raster order.
    """
    values = bmap.values if isinstance(bmap, BinaryMap) else np.asarray(bmap)
    mask = values == target_class
    h, w = mask.shape
    labels = np.zeros(h * w, dtype=np.int32)
    starts, ends = _runs(mask)
    n_runs = len(starts)
    if n_runs == 0:
        return ComponentLabeling(labels.reshape(h, w), np.zeros(1, dtype=np.int64))

    lengths = ends - starts
    target_idx = np.flatnonzero(mask)
    run_of = np.full(h * w, -1, dtype=np.int64)
    run_of[target_idx] = np.repeat(np.arange(n_runs), lengths)
    run_of = run_of.reshape(h, w)

    touching = mask[:-1] & mask[1:]
    pairs = np.unique(
        np.stack([run_of[:-1][touching], run_of[1:][touching]], axis=1), axis=0
    )

    parent = list(range(n_runs))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs.tolist():
        ra, rb = find(a), find(b)
        if ra < rb:
            parent[rb] = ra
        elif rb < ra:
            parent[ra] = rb

    roots = _find_roots(np.asarray(parent, dtype=np.int64))
    uniq, dense = np.unique(roots, return_inverse=True)
    run_label = (dense + 1).astype(np.int32)
    labels[target_idx] = np.repeat(run_label, lengths)
    counts = np.zeros(len(uniq) + 1, dtype=np.int64)
    np.add.at(counts, run_label, lengths)
    return ComponentLabeling(labels.reshape(h, w), counts)


def remove_small_water_components(bmap: BinaryMap, num_components: int) -> BinaryMap:
    """Turn WATER components smaller than ``num_components`` pixels into GROUND."""
    if num_components < 1:
        raise ValueError(f"num_components must be >= 1, got {num_components}")
    lab = label_components(bmap, WATER)
    small = lab.counts < num_components
    small[0] = False
    out = np.array(bmap.values, copy=True)
    out[small[lab.labels]] = GROUND
    return BinaryMap(out)


def segment_water(frame: SarFrame, params: DetectorParams) -> BinaryMap:
    plane = extract_channel(frame, params.channel)
    denoised = boxcar_filter(plane, params.kernel_size)
    seg = threshold_segment(denoised, params.threshold)
    return remove_small_water_components(seg, params.num_components)
