"""Synthetic SAR time series with known water geometry.

Pixels inside active water regions get ``water_level`` backscatter, all others
``ground_level``; both are multiplied by unit-mean Gamma speckle with ``L``
looks. Frame ``t`` draws its speckle from a Philox stream keyed by
``(seed, t)``, so any frame can be regenerated on its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Union

import numpy as np

from .errors import InvalidSpec
from .raster import SarFrame
from .rng import stream_generator


@dataclass(frozen=True)
class Rect:
    top: int
    left: int
    height: int
    width: int

    def mask(self, shape: tuple[int, int]) -> np.ndarray:
        m = np.zeros(shape, dtype=bool)
        m[max(self.top, 0) : max(self.top + self.height, 0), max(self.left, 0) : max(self.left + self.width, 0)] = True
        return m

    @property
    def area(self) -> int:
        return self.height * self.width


@dataclass(frozen=True)
class Disc:
    row: float
    col: float
    radius: float

    def mask(self, shape: tuple[int, int]) -> np.ndarray:
        r, c = np.ogrid[: shape[0], : shape[1]]
        return (r - self.row) ** 2 + (c - self.col) ** 2 <= self.radius**2

    @property
    def area(self) -> float:
        return np.pi * self.radius**2


Region = Union[Rect, Disc]


@dataclass(frozen=True)
class FloodEvent:
    """Region that is water on frames ``start_frame..end_frame`` (1-based, inclusive)."""

    region: Region
    start_frame: int
    end_frame: int


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    n_frames: int
    ground_level: float = 0.20
    water_level: float = 0.005
    permanent_regions: tuple[Region, ...] = ()
    flood_events: tuple[FloodEvent, ...] = ()
    speckle_looks: float | None = 4.0  # None disables speckle
    seed: int = 0
    start_time: datetime = datetime(2019, 1, 1, tzinfo=timezone.utc)
    revisit_days: float = 6.0

    def __post_init__(self):
        object.__setattr__(self, "permanent_regions", tuple(self.permanent_regions))
        object.__setattr__(self, "flood_events", tuple(self.flood_events))

    def frame_id(self, t: int) -> str:
        return f"frame_{t:0{max(3, len(str(self.n_frames)))}d}"

    def timestamp(self, t: int) -> datetime:
        return self.start_time + timedelta(days=self.revisit_days * (t - 1))


@dataclass(frozen=True, eq=False)
class SceneTruth:
    """Boolean stacks of shape ``(n_frames, H, W)``; index ``t - 1`` is frame ``t``."""

    water: np.ndarray
    flood: np.ndarray
    permanent: np.ndarray


def check_spec(spec: SceneSpec, threshold: float = 0.03) -> None:
    if spec.width < 1 or spec.height < 1 or spec.n_frames < 1:
        raise InvalidSpec(f"need positive size and frame count, got {spec.width}x{spec.height}x{spec.n_frames}")
    if not 0 <= spec.water_level < threshold < spec.ground_level:
        raise InvalidSpec(
            f"need 0 <= water_level < threshold < ground_level, got "
            f"{spec.water_level} / {threshold} / {spec.ground_level}"
        )
    if spec.speckle_looks is not None and not spec.speckle_looks >= 1:
        raise InvalidSpec(f"speckle_looks must be >= 1, got {spec.speckle_looks}")
    if not 0 <= spec.seed < 2**64:
        raise InvalidSpec(f"seed must fit in 64 unsigned bits, got {spec.seed}")
    for ev in spec.flood_events:
        if not 1 <= ev.start_frame <= ev.end_frame <= spec.n_frames:
            raise InvalidSpec(
                f"flood frames {ev.start_frame}..{ev.end_frame} outside 1..{spec.n_frames}"
            )


def apply_speckle(value, looks: float, draw):
    """Multiplicative speckle: ``value * draw`` with ``draw ~ Gamma(L, 1/L)``."""
    return np.multiply(value, draw)


def speckle_draws(rng: np.random.Generator, looks: float, size) -> np.ndarray:
    return rng.gamma(shape=looks, scale=1.0 / looks, size=size)


def scene_truth(spec: SceneSpec) -> SceneTruth:
    shape = (spec.height, spec.width)
    permanent = np.zeros(shape, dtype=bool)
    for region in spec.permanent_regions:
        permanent |= region.mask(shape)
    water = np.broadcast_to(permanent, (spec.n_frames, *shape)).copy()
    for ev in spec.flood_events:
        water[ev.start_frame - 1 : ev.end_frame] |= ev.region.mask(shape)
    return SceneTruth(water=water, flood=water & ~permanent, permanent=permanent)


def generate_frame(spec: SceneSpec, t: int, truth: SceneTruth | None = None) -> SarFrame:
    truth = truth if truth is not None else scene_truth(spec)
    base = np.where(truth.water[t - 1], spec.water_level, spec.ground_level)
    if spec.speckle_looks is not None:
        rng = stream_generator(spec.seed, t)
        base = apply_speckle(base, spec.speckle_looks, speckle_draws(rng, spec.speckle_looks, base.shape))
    return SarFrame(
        base.astype(np.float32)[None],
        ("VV",),
        timestamp=spec.timestamp(t),
        frame_id=spec.frame_id(t),
    )


def generate_sequence(spec: SceneSpec, threshold: float = 0.03) -> tuple[list[SarFrame], SceneTruth]:
    check_spec(spec, threshold)
    truth = scene_truth(spec)
    frames = [generate_frame(spec, t, truth) for t in range(1, spec.n_frames + 1)]
    return frames, truth


def _region_from_dict(d: dict, where: str) -> Region:
    kind = d.get("type")
    try:
        if kind == "rect":
            return Rect(int(d["top"]), int(d["left"]), int(d["height"]), int(d["width"]))
        if kind == "disc":
            return Disc(float(d["row"]), float(d["col"]), float(d["radius"]))
    except KeyError as exc:
        raise InvalidSpec(f"{where}: missing key {exc.args[0]!r}") from None
    raise InvalidSpec(f"{where}: region type must be 'rect' or 'disc', got {kind!r}")


def _region_to_dict(r: Region) -> dict:
    if isinstance(r, Rect):
        return {"type": "rect", "top": r.top, "left": r.left, "height": r.height, "width": r.width}
    return {"type": "disc", "row": r.row, "col": r.col, "radius": r.radius}


def scene_from_dict(d: dict) -> SceneSpec:
    """Build a spec from its JSON form (see README for the schema)."""
    from .fileio import parse_timestamp

    known = {f for f in SceneSpec.__dataclass_fields__} | {"params"}
    extra = set(d) - known
    if extra:
        raise InvalidSpec(f"unknown scene keys {sorted(extra)}")
    try:
        kw = dict(
            width=int(d["width"]),
            height=int(d["height"]),
            n_frames=int(d["n_frames"]),
        )
    except KeyError as exc:
        raise InvalidSpec(f"missing scene key {exc.args[0]!r}") from None
    for key in ("ground_level", "water_level", "revisit_days"):
        if key in d:
            kw[key] = float(d[key])
    if "speckle_looks" in d:
        kw["speckle_looks"] = None if d["speckle_looks"] is None else float(d["speckle_looks"])
    if "seed" in d:
        kw["seed"] = int(d["seed"])
    if "start_time" in d:
        kw["start_time"] = parse_timestamp(d["start_time"])
    kw["permanent_regions"] = tuple(
        _region_from_dict(r, f"permanent_regions[{i}]") for i, r in enumerate(d.get("permanent_regions", []))
    )
    events = []
    for i, ev in enumerate(d.get("flood_events", [])):
        try:
            events.append(
                FloodEvent(
                    _region_from_dict(ev["region"], f"flood_events[{i}].region"),
                    int(ev["start_frame"]),
                    int(ev["end_frame"]),
                )
            )
        except KeyError as exc:
            raise InvalidSpec(f"flood_events[{i}]: missing key {exc.args[0]!r}") from None
    kw["flood_events"] = tuple(events)
    return SceneSpec(**kw)


def scene_to_dict(spec: SceneSpec) -> dict:
    return {
        "width": spec.width,
        "height": spec.height,
        "n_frames": spec.n_frames,
        "ground_level": spec.ground_level,
        "water_level": spec.water_level,
        "speckle_looks": spec.speckle_looks,
        "seed": spec.seed,
        "start_time": spec.start_time.isoformat(),
        "revisit_days": spec.revisit_days,
        "permanent_regions": [_region_to_dict(r) for r in spec.permanent_regions],
        "flood_events": [
            {"region": _region_to_dict(e.region), "start_frame": e.start_frame, "end_frame": e.end_frame}
            for e in spec.flood_events
        ],
    }
