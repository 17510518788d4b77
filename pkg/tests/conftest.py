from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from floodvibe.raster import DetectorParams, FrameRef, SarFrame, SequenceManifest

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

T0 = datetime(2020, 3, 1, tzinfo=timezone.utc)


def make_manifest(n_frames, params=None, seed=0, paths=None):
    refs = tuple(
        FrameRef(f"f{i:03d}", paths[i - 1] if paths else None, T0 + timedelta(days=6 * i))
        for i in range(1, n_frames + 1)
    )
    return SequenceManifest(refs, params or DetectorParams(), seed)


def const_frame(vv, vh=None, shape=(8, 8), frame_id="f"):
    planes = [np.full(shape, vv, dtype=np.float32)]
    labels = ["VV"]
    if vh is not None:
        planes.append(np.full(shape, vh, dtype=np.float32))
        labels.append("VH")
    return SarFrame(np.stack(planes), tuple(labels), T0, frame_id)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(name, ok, detail)`` then assert ``ok``."""

    def record(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
