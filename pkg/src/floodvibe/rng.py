"""Counter-based hashing for the background-model update.

Every random draw is a pure function of ``(seed, frame_index, pixel_index)``,
so results do not depend on evaluation order or how work is split.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_PIXEL_STRIDE = 0xD1B54A32D192ED03


def _mix(z: np.ndarray) -> np.ndarray:
    # splitmix64 step; uint64 arithmetic wraps modulo 2**64
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def pixel_hash(seed: int, frame_index: int, pixel_index) -> np.ndarray:
    """64-bit hash per pixel index (array-valued)."""
    pix = np.asarray(pixel_index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = _mix(np.array([(seed + frame_index * _GOLDEN) & _MASK], dtype=np.uint64))
        return _mix(key ^ (pix * np.uint64(_PIXEL_STRIDE)))


def slot_indices(seed: int, frame_index: int, shape: tuple[int, int], K: int) -> np.ndarray:
    """Sample slot in ``[0, K)`` to overwrite at every pixel of a ``shape`` grid."""
    n = int(np.prod(shape))
    h = pixel_hash(seed, frame_index, np.arange(n, dtype=np.uint64))
    return (h % np.uint64(K)).astype(np.intp).reshape(shape)


def stream_generator(seed: int, stream: int) -> np.random.Generator:
    """Independent Philox generator keyed by ``(seed, stream)``."""
    key = np.array([seed & _MASK, stream & _MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
