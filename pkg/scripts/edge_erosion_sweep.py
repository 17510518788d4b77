"""Best-case flood IoU of a WxH rectangle under the boxcar + threshold step.

With no speckle, a pixel near a water edge stays WATER only while the water
fraction f of its window satisfies f*water + (1-f)*ground <= threshold. The
sweep shows how that bounds IoU for a given kernel and backscatter contrast.

    python scripts/edge_erosion_sweep.py --height 60 --width 80
"""

import argparse

import numpy as np

from floodvibe.raster import WATER, DetectorParams
from floodvibe.segmentation import segment_water
from floodvibe.synthetic import FloodEvent, Rect, SceneSpec, generate_sequence


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--height", type=int, default=60)
    ap.add_argument("--width", type=int, default=80)
    ap.add_argument("--water-level", type=float, default=0.005)
    args = ap.parse_args()

    rect = Rect(40, 40, args.height, args.width)
    print(f"{'kernel':>6} {'ground':>7} {'min_frac':>8} {'iou':>6}")
    for k in (1, 3, 5, 8):
        for ground in (0.06, 0.1, 0.2, 0.4):
            p = DetectorParams(kernel_size=k)
            spec = SceneSpec(
                args.width + 80, args.height + 80, 1, ground_level=ground, water_level=args.water_level,
                flood_events=(FloodEvent(rect, 1, 1),), speckle_looks=None,
            )
            frames, truth = generate_sequence(spec, p.threshold)
            seg = segment_water(frames[0], p).values == WATER
            t = truth.water[0]
            score = np.count_nonzero(seg & t) / np.count_nonzero(seg | t)
            frac = (ground - p.threshold) / (ground - args.water_level)
            print(f"{k:>6} {ground:>7.3f} {frac:>8.3f} {score:>6.3f}")


if __name__ == "__main__":
    main()
