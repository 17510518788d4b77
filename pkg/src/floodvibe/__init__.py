"""Unsupervised flood mapping on SAR time series with a binary ViBe-style background model."""

from .anomaly import (
    BackgroundModel,
    DetectorState,
    classify_frame,
    init_background,
    run_detector,
    update_model,
)
from .evaluation import ConfusionCounts, confusion_counts, summary_metrics
from .raster import (
    GROUND,
    WATER,
    BinaryMap,
    DetectorParams,
    FloodMask,
    FrameRef,
    SarFrame,
    SequenceManifest,
    extract_channel,
    validate_sequence,
)
from .segmentation import (
    boxcar_filter,
    label_components,
    remove_small_water_components,
    segment_water,
    threshold_segment,
)

__version__ = "0.1.0"
