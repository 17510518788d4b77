"""Time detection over N frames of a square synthetic scene.

    FLOODVIBE_THREADS=1 python scripts/throughput.py --size 512 --frames 45
"""

import argparse
import time

from floodvibe.anomaly import run_detector
from floodvibe.raster import DetectorParams, FrameRef, SequenceManifest
from floodvibe.synthetic import Disc, FloodEvent, Rect, SceneSpec, generate_sequence

ap = argparse.ArgumentParser()
ap.add_argument("--size", type=int, default=512)
ap.add_argument("--frames", type=int, default=45)
ap.add_argument("--threads", type=int, default=None)
args = ap.parse_args()

n = args.size
spec = SceneSpec(
    n, n, args.frames,
    permanent_regions=(Disc(n / 2, n / 2.5, n / 6),),
    flood_events=(FloodEvent(Rect(n // 12, n * 5 // 8, n // 4, n // 3), max(1, args.frames - 10), args.frames - 5),),
    seed=1,
)
frames, _ = generate_sequence(spec)
params = DetectorParams(n_init=min(30, args.frames - 1))
manifest = SequenceManifest(tuple(FrameRef(f.frame_id, None, f.timestamp) for f in frames), params, 1)
t0 = time.perf_counter()
masks, _ = run_detector(manifest, frames, threads=args.threads)
dt = time.perf_counter() - t0
print(f"{len(frames)} frames of {n}x{n}: {dt:.2f} s, {len(frames) / dt:.1f} frames/s")
