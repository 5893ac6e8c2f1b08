"""Photon-number fluctuation correlation reconstruction.

Each pixel's counts over the stack are split into positive and negative
deviations from the pixel's temporal mean, combined into four absolute
product terms per window, and averaged over windows::

    pp = |d+ d'+|            mm = |d- d'-|
    pm = |(nbar - d+)(nbar - d'-)|
    mp = |(nbar - d-)(nbar - d'+)|
    G  = (1/M) sum_alpha ((pp + mm) + (pm + mp))

In autocorrelation mode (AC) the primed stream is the pixel itself
(M = m); in cross-correlation mode (CC) it is the same pixel in the next
frame (M = m - 1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import CCNeedsTwoFrames, EmptyStack, NotColor
from .types import Frame, FrameStack, ScalarImage, validate_stack


class PairingMode(enum.Enum):
    AC = "ac"
    CC = "cc"

    @classmethod
    def parse(cls, value) -> "PairingMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"mode must be 'ac' or 'cc', got {value!r}") from None


@dataclass(frozen=True)
class FluctuationPair:
    d_pos: float
    d_neg: float


@dataclass(frozen=True)
class QuadTerms:
    pp: float
    mm: float
    pm: float
    mp: float

    def total(self) -> float:
        return (self.pp + self.mm) + (self.pm + self.mp)


def classify(n: float, nbar: float) -> FluctuationPair:
    """Split one window's count into positive/negative deviation from ``nbar``."""
    d = n - nbar
    return FluctuationPair(d if n > nbar else 0.0, d if n < nbar else 0.0)


def quad_terms(a: FluctuationPair, b: FluctuationPair, nbar: float) -> QuadTerms:
    return QuadTerms(
        pp=abs(a.d_pos * b.d_pos),
        mm=abs(a.d_neg * b.d_neg),
        pm=abs((nbar - a.d_pos) * (nbar - b.d_neg)),
        mp=abs((nbar - a.d_neg) * (nbar - b.d_pos)),
    )


def _check(stack: FrameStack, mode: PairingMode) -> PairingMode:
    mode = PairingMode.parse(mode)
    validate_stack(stack)
    if mode is PairingMode.CC and stack.m < 2:
        raise CCNeedsTwoFrames(stack.m)
    return mode


def mean_image(stack: FrameStack) -> ScalarImage:
    """Per-pixel temporal mean of the stack (the traditional image)."""
    if stack.m == 0:
        raise EmptyStack()
    validate_stack(stack)
    counts = stack.to_array()
    m, h, w, c = counts.shape
    nbar = _backend.kernels.temporal_mean(np.ascontiguousarray(counts.reshape(m, -1)))
    return ScalarImage(nbar.reshape(h, w, c))


def reconstruct_g2(stack: FrameStack, mode=PairingMode.AC, threads=None) -> ScalarImage:
    """Correlation image for every pixel and channel of ``stack``.

    Uses the compiled kernel when available. Results are bit-identical to
    :func:`reference_g2` for any ``threads`` value.
    """
    mode = _check(stack, mode)
    counts = stack.to_array()
    m, h, w, c = counts.shape
    flat = np.ascontiguousarray(counts.reshape(m, h * w * c))
    g = _backend.kernels.g2(flat, mode is PairingMode.CC, _backend.resolve_threads(threads))
    return ScalarImage(g.reshape(h, w, c))


def reference_g2(stack: FrameStack, mode=PairingMode.AC) -> ScalarImage:
    """Naive sequential per-pixel evaluation, kept as an independent oracle."""
    mode = _check(stack, mode)
    h, w, c = stack.shape
    series = [f.counts.reshape(-1).tolist() for f in stack.frames]
    m = len(series)
    out = []
    for p in range(h * w * c):
        ns = [series[a][p] for a in range(m)]
        nbar = sum(ns) / m
        pairs = [classify(float(n), nbar) for n in ns]
        if mode is PairingMode.AC:
            couples = [(x, x) for x in pairs]
        else:
            couples = list(zip(pairs[:-1], pairs[1:]))
        acc = 0.0
        for x, y in couples:
            acc += quad_terms(x, y, nbar).total()
        out.append(acc / len(couples))
    return ScalarImage(np.array(out, dtype=np.float64).reshape(h, w, c))


def reconstruct_color(stack: FrameStack, mode=PairingMode.AC, threads=None) -> ScalarImage:
    """Reconstruct each RGB channel independently, preserving channel order."""
    validate_stack(stack)
    if stack.shape[2] != 3:
        raise NotColor(stack.shape[2])
    planes = [reconstruct_g2(stack.channel(c), mode, threads).values[:, :, 0] for c in range(3)]
    return ScalarImage(np.stack(planes, axis=-1))


def normalize_display(img: ScalarImage, bit_depth: int = 8) -> Frame:
    """Min-max map each channel onto the full count range, rounding half to even.

    A constant channel maps to zero.
    """
    top = 2 ** bit_depth - 1
    out = np.zeros(img.shape, dtype=np.uint8 if bit_depth == 8 else np.uint16)
    for c in range(img.channels):
        v = img.values[:, :, c]
        lo, hi = v.min(), v.max()
        if hi > lo:
            out[:, :, c] = np.rint((v - lo) / (hi - lo) * top)
    return Frame(out, bit_depth)
