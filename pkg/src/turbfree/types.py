"""Shared image and frame-stack data model.

All arrays are stored as ``(height, width, channels)`` numpy arrays in C
order, i.e. row-major with interleaved channels. Instances are frozen and
their arrays are marked read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CountOutOfRange, EmptyStack, ShapeMismatch

SUPPORTED_BIT_DEPTHS = (8, 16)


def _as_hwc(array, dtype=None) -> np.ndarray:
    a = np.array(array, dtype=dtype, copy=True)
    if a.ndim == 2:
        a = a[:, :, np.newaxis]
    if a.ndim != 3:
        raise ValueError(f"expected a 2-D or 3-D array, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"image must be at least 1x1, got {a.shape[:2]}")
    if a.shape[2] not in (1, 3):
        raise ValueError(f"channels must be 1 or 3, got {a.shape[2]}")
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class _Shaped:
    _data: np.ndarray

    @property
    def height(self) -> int:
        return self._data.shape[0]

    @property
    def width(self) -> int:
        return self._data.shape[1]

    @property
    def channels(self) -> int:
        return self._data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._data.shape


@dataclass(frozen=True, eq=False)
class Frame(_Shaped):
    """One camera exposure of integer photon counts.

    ``counts`` may be 2-D (grayscale) or ``(H, W, 3)``. Count range is not
    enforced here; :func:`validate_stack` reports out-of-range samples.
    """

    counts: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if self.bit_depth not in SUPPORTED_BIT_DEPTHS:
            raise ValueError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        counts = np.asarray(self.counts)
        if not np.issubdtype(counts.dtype, np.integer):
            raise TypeError(f"counts must be integers, got dtype {counts.dtype}")
        object.__setattr__(self, "counts", _as_hwc(counts))

    @property
    def _data(self):
        return self.counts

    @property
    def max_count(self) -> int:
        return 2 ** self.bit_depth - 1

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (self.bit_depth == other.bit_depth
                and self.counts.shape == other.counts.shape
                and np.array_equal(self.counts, other.counts))


@dataclass(frozen=True, eq=False)
class ScalarImage(_Shaped):
    """Real-valued image, e.g. a mean image or a reconstruction."""

    values: np.ndarray

    def __post_init__(self):
        values = _as_hwc(self.values, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise ValueError("ScalarImage values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def _data(self):
        return self.values

    def channel(self, c: int) -> "ScalarImage":
        return ScalarImage(self.values[:, :, c])

    def __eq__(self, other):
        if not isinstance(other, ScalarImage):
            return NotImplemented
        return (self.values.shape == other.values.shape
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True, eq=False)
class Scene(_Shaped):
    """Ground-truth reflectance map with values in [0, 1]."""

    reflectance: np.ndarray

    def __post_init__(self):
        r = _as_hwc(self.reflectance, dtype=np.float64)
        if not np.all(np.isfinite(r)) or r.min() < 0.0 or r.max() > 1.0:
            raise ValueError("reflectance values must lie within [0, 1]")
        object.__setattr__(self, "reflectance", r)

    @property
    def _data(self):
        return self.reflectance


@dataclass(frozen=True, eq=False)
class FrameStack:
    """Ordered sequence of frames; frame ``alpha`` is one short time window.

    Construction does not validate; call :func:`validate_stack`.
    """

    frames: tuple[Frame, ...]

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))

    @classmethod
    def from_array(cls, counts, bit_depth: int = 8) -> "FrameStack":
        """Build a stack from an ``(m, H, W)`` or ``(m, H, W, C)`` array."""
        counts = np.asarray(counts)
        if counts.ndim not in (3, 4):
            raise ValueError(f"expected (m, H, W[, C]) array, got shape {counts.shape}")
        return cls(tuple(Frame(c, bit_depth) for c in counts))

    @property
    def m(self) -> int:
        return len(self.frames)

    def __len__(self):
        return len(self.frames)

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)

    def __getitem__(self, i):
        return self.frames[i]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.frames[0].shape

    @property
    def bit_depth(self) -> int:
        return self.frames[0].bit_depth

    def to_array(self) -> np.ndarray:
        """Counts as a contiguous ``(m, H, W, C)`` array of the narrowest dtype."""
        dtype = np.uint8 if self.bit_depth == 8 else np.uint16
        return np.stack([f.counts for f in self.frames]).astype(dtype, copy=False)

    def channel(self, c: int) -> "FrameStack":
        return FrameStack(tuple(Frame(f.counts[:, :, c], f.bit_depth) for f in self.frames))

    def __eq__(self, other):
        if not isinstance(other, FrameStack):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))


def validate_stack(stack: FrameStack) -> None:
    """Raise on the first violated stack invariant; return ``None`` if valid.

    Frame indices in errors are 1-based, pixel indices are 0-based flat
    offsets into the row-major, channel-interleaved sample array.
    """
    if stack.m == 0:
        raise EmptyStack()
    first = stack.frames[0]
    for alpha, frame in enumerate(stack.frames, start=1):
        if frame.shape != first.shape:
            raise ShapeMismatch(alpha, f"{frame.shape} vs {first.shape}")
        if frame.bit_depth != first.bit_depth:
            raise ShapeMismatch(alpha, f"bit depth {frame.bit_depth} vs {first.bit_depth}")
        flat = frame.counts.reshape(-1)
        bad = np.flatnonzero((flat < 0) | (flat > frame.max_count))
        if bad.size:
            i = int(bad[0])
            raise CountOutOfRange(alpha, i, int(flat[i]), frame.bit_depth)


def frame_to_scalar(frame: Frame) -> ScalarImage:
    return ScalarImage(frame.counts.astype(np.float64))


def stack_from_frames(frames: Sequence[Frame]) -> FrameStack:
    stack = FrameStack(tuple(frames))
    validate_stack(stack)
    return stack
