"""On-disk formats.

FR32 raster (all integers little-endian)::

    offset 0   4s   magic b"FR32"
    offset 4   u16  version (1)
    offset 6   u16  channel_count (1 or 2)
    offset 8   u32  width
    offset 12  u32  height
    offset 16  f32  channel_count * height * width values, channel-planar, row-major
    footer          per channel: u8 label length, ASCII label ("VV" / "VH")

Values are linear-power backscatter. Masks are binary PGM (P5, maxval 255)
with 255 for water/flood and 0 elsewhere.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    FormatError,
    NonBinaryValue,
    SchemaError,
    TruncatedPayload,
    UnsupportedVersion,
)
from .raster import CHANNEL_LABELS, UINT64_MAX, DetectorParams, FrameRef, SarFrame, SequenceManifest

MAGIC = b"FR32"
VERSION = 1
_HEADER = struct.Struct("<4sHHII")


def atomic_write(path, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_raster(frame: SarFrame) -> bytes:
    c, h, w = frame.channels.shape
    header = _HEADER.pack(MAGIC, VERSION, c, w, h)
    payload = frame.channels.astype("<f4").tobytes()
    footer = b"".join(bytes([len(lab)]) + lab.encode("ascii") for lab in frame.channel_labels)
    return header + payload + footer


def decode_raster(data: bytes, path=None, frame_id: str = "", timestamp=None) -> SarFrame:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(f"bad magic {bytes(data[:4])!r}, expected {MAGIC!r}", 0, path)
    if len(data) < _HEADER.size:
        raise TruncatedPayload("truncated header", len(data), path)
    _, version, c, w, h = _HEADER.unpack_from(data)
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported version {version}", 4, path)
    if not 1 <= c <= 2:
        raise FormatError(f"channel_count must be 1 or 2, got {c}", 6, path)
    n_bytes = 4 * c * w * h
    end = _HEADER.size + n_bytes
    if len(data) < end:
        raise TruncatedPayload(
            f"payload needs {n_bytes} bytes for {c}x{h}x{w}, file has {len(data) - _HEADER.size}",
            len(data),
            path,
        )
    planes = np.frombuffer(data, dtype="<f4", count=c * w * h, offset=_HEADER.size)
    planes = planes.astype(np.float32).reshape(c, h, w)
    labels = []
    pos = end
    for _ in range(c):
        if pos >= len(data):
            raise TruncatedPayload("truncated channel-label footer", len(data), path)
        n = data[pos]
        if pos + 1 + n > len(data):
            raise TruncatedPayload("truncated channel-label footer", len(data), path)
        raw = bytes(data[pos + 1 : pos + 1 + n])
        label = raw.decode("ascii", errors="replace")
        if label not in CHANNEL_LABELS:
            raise FormatError(f"unknown channel label {raw!r}", pos, path)
        labels.append(label)
        pos += 1 + n
    if pos != len(data):
        raise FormatError(f"{len(data) - pos} trailing bytes after footer", pos, path)
    try:
        return SarFrame(planes, tuple(labels), timestamp=timestamp, frame_id=frame_id)
    except ValueError as exc:
        raise FormatError(str(exc), _HEADER.size, path) from None


def write_raster(frame: SarFrame, path) -> None:
    atomic_write(path, encode_raster(frame))


def read_raster(path, frame_id: str | None = None, timestamp: datetime | None = None) -> SarFrame:
    """Load an FR32 file. ``frame_id`` defaults to the file name without suffix."""
    path = Path(path)
    data = path.read_bytes()
    return decode_raster(data, path, frame_id if frame_id is not None else path.stem, timestamp)


def _mask_values(mask) -> np.ndarray:
    arr = np.asarray(getattr(mask, "values", mask))
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("mask values must be 0 or 1")
    return arr.astype(np.uint8)


def encode_mask(mask) -> bytes:
    arr = _mask_values(mask)
    h, w = arr.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + (arr * 255).astype(np.uint8).tobytes()


def _pgm_header(data: bytes, path):
    """Parse the P5 header; returns (width, height, maxval, payload offset)."""
    if data[:2] != b"P5":
        raise BadMagic(f"bad magic {bytes(data[:2])!r}, expected b'P5'", 0, path)
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            if pos >= len(data):
                raise TruncatedPayload("truncated PGM header", pos, path)
            raise FormatError(f"unexpected byte {data[pos:pos + 1]!r} in PGM header", pos, path)
        fields.append(int(data[start:pos]))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise TruncatedPayload("PGM header not terminated", pos, path)
    return fields[0], fields[1], fields[2], pos + 1


def decode_mask(data: bytes, path=None) -> np.ndarray:
    w, h, maxval, off = _pgm_header(data, path)
    if maxval != 255:
        raise FormatError(f"maxval must be 255, got {maxval}", off - 1, path)
    if len(data) < off + w * h:
        raise TruncatedPayload(f"payload needs {w * h} bytes", len(data), path)
    if len(data) > off + w * h:
        raise FormatError("trailing bytes after PGM payload", off + w * h, path)
    raw = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=off)
    bad = np.flatnonzero((raw != 0) & (raw != 255))
    if bad.size:
        raise NonBinaryValue(f"byte value {raw[bad[0]]} is not 0 or 255", off + int(bad[0]), path)
    return (raw // 255).astype(np.uint8).reshape(h, w)


def write_mask(mask, path) -> None:
    atomic_write(path, encode_mask(mask))


def read_mask(path) -> np.ndarray:
    """Read a binary PGM as a 0/1 uint8 array."""
    path = Path(path)
    return decode_mask(path.read_bytes(), path)


def parse_timestamp(value) -> datetime:
    """ISO-8601 string to an aware UTC datetime; naive input is taken as UTC."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


_PARAM_TYPES = {
    "kernel_size": int,
    "threshold": float,
    "num_components": int,
    "K": int,
    "k_min": int,
    "n_init": int,
    "channel": str,
}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def params_from_dict(d, pointer: str = "/params") -> DetectorParams:
    if not isinstance(d, dict):
        raise SchemaError(pointer, "must be an object")
    kw = {}
    for key, value in d.items():
        where = f"{pointer}/{key}"
        kind = _PARAM_TYPES.get(key)
        if kind is None:
            raise SchemaError(where, "unknown parameter")
        if kind is int and not _is_int(value):
            raise SchemaError(where, f"must be an integer, got {value!r}")
        if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise SchemaError(where, f"must be a number, got {value!r}")
        if kind is str and not isinstance(value, str):
            raise SchemaError(where, f"must be a string, got {value!r}")
        kw[key] = float(value) if kind is float else value
    params = DetectorParams(**kw)
    for name, msg in params.problems():
        raise SchemaError(f"{pointer}/{name}", msg)
    return params


def manifest_from_dict(doc, base_dir=".") -> SequenceManifest:
    """Validate and convert a parsed manifest document.

    Relative frame paths resolve against ``base_dir``.
    """
    base_dir = Path(base_dir)
    if not isinstance(doc, dict):
        raise SchemaError("", "manifest must be a JSON object")
    extra = set(doc) - {"frames", "params", "seed"}
    if extra:
        raise SchemaError(f"/{sorted(extra)[0]}", "unknown key")
    frames_doc = doc.get("frames")
    if not isinstance(frames_doc, list):
        raise SchemaError("/frames", "required list of frames")
    refs = []
    for i, f in enumerate(frames_doc):
        where = f"/frames/{i}"
        if not isinstance(f, dict):
            raise SchemaError(where, "must be an object")
        for key in ("id", "path", "timestamp"):
            if key not in f:
                raise SchemaError(f"{where}/{key}", "required")
            if not isinstance(f[key], str) or not f[key]:
                raise SchemaError(f"{where}/{key}", "must be a non-empty string")
        extra = set(f) - {"id", "path", "timestamp"}
        if extra:
            raise SchemaError(f"{where}/{sorted(extra)[0]}", "unknown key")
        try:
            ts = parse_timestamp(f["timestamp"])
        except ValueError as exc:
            raise SchemaError(f"{where}/timestamp", str(exc)) from None
        refs.append(FrameRef(f["id"], base_dir / f["path"], ts))

    seen = {}
    for i, ref in enumerate(refs):
        if ref.frame_id in seen:
            raise SchemaError(
                f"/frames/{i}/id", f"duplicate frame id {ref.frame_id!r} (also /frames/{seen[ref.frame_id]})"
            )
        seen[ref.frame_id] = i
    for i in range(1, len(refs)):
        prev, cur = refs[i - 1], refs[i]
        if not cur.timestamp > prev.timestamp:
            raise SchemaError(
                f"/frames/{i}/timestamp",
                f"timestamps not strictly ascending: {prev.frame_id!r} then {cur.frame_id!r}",
            )

    params = params_from_dict(doc.get("params", {}))
    seed = doc.get("seed", 0)
    if not _is_int(seed) or not 0 <= seed <= UINT64_MAX:
        raise SchemaError("/seed", f"must be an unsigned 64-bit integer, got {seed!r}")
    return SequenceManifest(tuple(refs), params, seed)


def parse_manifest(path) -> SequenceManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None
    except UnicodeDecodeError as exc:
        raise SchemaError("", f"not UTF-8 text: {exc}") from None
    return manifest_from_dict(doc, path.parent)


def manifest_to_dict(manifest: SequenceManifest, base_dir=None) -> dict:
    def rel(p: Path) -> str:
        if base_dir is not None:
            try:
                return Path(os.path.relpath(p, base_dir)).as_posix()
            except ValueError:
                pass
        return Path(p).as_posix()

    p = manifest.params
    return {
        "frames": [
            {"id": r.frame_id, "path": rel(r.path), "timestamp": format_timestamp(r.timestamp)}
            for r in manifest.frames
        ],
        "params": {k: getattr(p, k) for k in _PARAM_TYPES},
        "seed": manifest.seed,
    }


def write_manifest(manifest: SequenceManifest, path) -> None:
    path = Path(path)
    doc = manifest_to_dict(manifest, path.parent)
    atomic_write(path, (json.dumps(doc, indent=2) + "\n").encode("utf-8"))
