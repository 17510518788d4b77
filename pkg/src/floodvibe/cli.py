"""Command-line interface.

Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import fileio
from .anomaly import run_detector
from .errors import FloodVibeError, FormatError, FrameError, LengthMismatch, SchemaError
from .evaluation import confusion_counts, frame_counts, summary_metrics
from .raster import WATER, DetectorParams, FrameRef, SequenceManifest, validate_sequence
from .segmentation import segment_water
from .synthetic import check_spec, generate_sequence, scene_from_dict, scene_to_dict

log = logging.getLogger("floodvibe")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_INTERNAL = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def cmd_segment(args) -> int:
    params = DetectorParams(
        kernel_size=args.kernel_size,
        threshold=args.threshold,
        num_components=args.min_components,
        channel=args.channel,
    )
    probs = params.problems()
    if probs:
        raise CliError("; ".join(f"{f}: {m}" for f, m in probs), EXIT_VALIDATION)
    frame = fileio.read_raster(args.input)
    seg = segment_water(frame, params)
    fileio.write_mask(seg.values == WATER, args.output)
    n_water = int(np.count_nonzero(seg.values == WATER))
    print(f"water_pixels={n_water} total_pixels={seg.values.size}")
    return EXIT_OK


def cmd_detect(args) -> int:
    manifest = fileio.parse_manifest(args.manifest)
    if args.seed is not None:
        manifest = dataclasses.replace(manifest, seed=args.seed)
    problems = validate_sequence(manifest)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return EXIT_VALIDATION
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frames = [fileio.read_raster(r.path, r.frame_id, r.timestamp) for r in manifest.frames]
    t0 = time.perf_counter()
    masks, state = run_detector(manifest, frames, emit_warmup_zeros=args.emit_warmup_zeros)
    elapsed = time.perf_counter() - t0
    for mask in masks:
        ref = manifest.frames[mask.frame_index - 1]
        fileio.write_mask(mask, out_dir / f"{ref.frame_id}.flood.pgm")
    print(
        f"frames={len(frames)} masks_written={len(masks)} "
        f"seconds={elapsed:.3f} frames_per_second={len(frames) / max(elapsed, 1e-9):.1f}"
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        doc = json.loads(Path(args.scene).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.scene}: invalid JSON: {exc}", EXIT_VALIDATION) from None
    if not isinstance(doc, dict):
        raise CliError(f"{args.scene}: scene must be a JSON object", EXIT_VALIDATION)
    spec = scene_from_dict(doc)
    params = fileio.params_from_dict(doc.get("params", {}))
    check_spec(spec, params.threshold)
    frames, truth = generate_sequence(spec, params.threshold)

    out = Path(args.out_dir)
    frame_dir, truth_dir = out / "frames", out / "truth"
    frame_dir.mkdir(parents=True, exist_ok=True)
    truth_dir.mkdir(parents=True, exist_ok=True)
    refs = []
    for t, frame in enumerate(frames, 1):
        path = frame_dir / f"{frame.frame_id}.fr32"
        fileio.write_raster(frame, path)
        fileio.write_mask(truth.flood[t - 1], truth_dir / f"{frame.frame_id}.flood.pgm")
        fileio.write_mask(truth.water[t - 1], truth_dir / f"{frame.frame_id}.water.pgm")
        refs.append(FrameRef(frame.frame_id, path, frame.timestamp))
    manifest = SequenceManifest(tuple(refs), params, spec.seed)
    fileio.write_manifest(manifest, out / "manifest.json")
    fileio.atomic_write(out / "scene.json", (json.dumps(scene_to_dict(spec), indent=2) + "\n").encode())
    print(f"frames={len(frames)} manifest={out / 'manifest.json'}")
    return EXIT_OK


def _format_value(v) -> str:
    if v is None:
        return "undefined"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def cmd_eval(args) -> int:
    pred_dir, truth_dir = Path(args.pred_dir), Path(args.truth_dir)
    for d in (pred_dir, truth_dir):
        if not d.is_dir():
            raise CliError(f"not a directory: {d}", EXIT_IO)
    suffix = ".flood.pgm"
    truth_files = sorted(truth_dir.glob(f"*{suffix}"))
    index = {p.name: i for i, p in enumerate(truth_files, 1)}
    preds = sorted(pred_dir.glob(f"*{suffix}"))
    missing = [p.name for p in preds if p.name not in index]
    if missing:
        raise LengthMismatch(f"no reference mask for {missing[0]} ({len(missing)} total)")

    scored = [p for p in preds if index[p.name] >= args.score_from]
    pred_masks = [fileio.read_mask(p) for p in scored]
    truth_masks = [fileio.read_mask(truth_dir / p.name) for p in scored]
    counts = confusion_counts(pred_masks, truth_masks)
    metrics = summary_metrics(counts)
    report = {
        "frames_scored": len(scored),
        **counts.as_dict(),
        **metrics,
    }
    if args.per_frame:
        report["per_frame"] = {
            p.name[: -len(suffix)]: summary_metrics(frame_counts(a, b))["iou"]
            for p, a, b in zip(scored, pred_masks, truth_masks)
        }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for key, value in report.items():
            if key == "per_frame":
                for fid, v in value.items():
                    print(f"iou[{fid}]={_format_value(v)}")
            else:
                print(f"{key}={_format_value(value)}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        manifest = fileio.parse_manifest(args.manifest)
    except SchemaError as exc:
        print(f"schema error at {exc.pointer or '/'}: {exc.message}")
        return EXIT_VALIDATION
    problems = validate_sequence(manifest)
    if not problems:
        print(f"ok: {len(manifest.frames)} frames, n_init={manifest.params.n_init}")
        return EXIT_OK
    for p in problems:
        print(p)
    return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    defaults = DetectorParams()
    parser = argparse.ArgumentParser(prog="floodvibe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="water mask for one raster")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--kernel-size", type=int, default=defaults.kernel_size)
    p.add_argument("--threshold", type=float, default=defaults.threshold)
    p.add_argument("--min-components", type=int, default=defaults.num_components)
    p.add_argument("--channel", default=defaults.channel)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("detect", help="flood masks for a manifest sequence")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--emit-warmup-zeros", action="store_true")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="synthetic sequence, truth masks and manifest")
    p.add_argument("--scene", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="score predicted masks against references")
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--truth-dir", required=True)
    p.add_argument("--score-from", type=int, default=1, help="first 1-based frame index to score")
    p.add_argument("--json", action="store_true")
    p.add_argument("--per-frame", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("validate", help="check a manifest and its frames")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FrameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc.cause, (OSError, FormatError)) else EXIT_VALIDATION
    except (OSError, FormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FloodVibeError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
