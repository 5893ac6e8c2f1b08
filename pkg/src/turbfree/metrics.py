"""SSIM / PSNR and the measurement-count sweep."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ShapeMismatch
from .reconstruct import PairingMode, mean_image, reconstruct_g2
from .rng import derive_seed
from .sim import SimModel, render_reference, render_stack
from .types import ScalarImage, Scene, frame_to_scalar

PSNR_CAP = 99.0


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0 or self.dynamic_range <= 0:
            raise ValueError("k1, k2 and dynamic_range must be > 0")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("window must be a positive odd size")


@dataclass(frozen=True)
class CurvePoint:
    m: int
    ssim: float
    psnr: float


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """Normalised 1-D Gaussian taps; the 2-D window is their outer product."""
    x = np.arange(size) - (size - 1) / 2
    g = np.exp(-(x * x) / (2 * sigma * sigma))
    return g / g.sum()


def _values(img):
    return img.values if isinstance(img, ScalarImage) else np.asarray(img, dtype=np.float64)


def _check_shapes(a, b):
    if a.shape != b.shape:
        raise ShapeMismatch(2, f"image shapes {a.shape} and {b.shape} differ")


def _filter_valid(x, g):
    """Separable 'valid' correlation of a 2-D array with the 1-D taps ``g``."""
    k = g.size
    rows = sliding_window_view(x, k, axis=0) @ g
    return sliding_window_view(rows, k, axis=1) @ g


def _window_for(shape, p):
    # images smaller than the window use the largest odd window that fits
    size = min(p.window, *shape)
    if size % 2 == 0:
        size -= 1
    return gaussian_window(size, p.sigma)


def _ssim_plane(x, y, p):
    g = _window_for(x.shape, p)
    c1 = (p.k1 * p.dynamic_range) ** 2
    c2 = (p.k2 * p.dynamic_range) ** 2
    mx, my = _filter_valid(x, g), _filter_valid(y, g)
    vx = _filter_valid(x * x, g) - mx * mx
    vy = _filter_valid(y * y, g) - my * my
    cxy = _filter_valid(x * y, g) - mx * my
    smap = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
    return float(smap.mean())


def ssim(a, b, p: SsimParams = SsimParams()) -> float:
    """Mean SSIM over all window positions fully inside the image.

    Colour images score as the mean of per-channel SSIM.
    """
    x, y = _values(a), _values(b)
    _check_shapes(x, y)
    if x.ndim == 2:
        return _ssim_plane(x, y, p)
    return float(np.mean([_ssim_plane(x[:, :, c], y[:, :, c], p) for c in range(x.shape[2])]))


def psnr(a, b, dynamic_range: float = 1.0) -> float:
    x, y = _values(a), _values(b)
    _check_shapes(x, y)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(dynamic_range ** 2 / mse))


def normalize_unit(img) -> ScalarImage:
    """Per-channel min-max map onto [0, 1]; a constant channel maps to 0."""
    v = _values(img)
    v = v if v.ndim == 3 else v[:, :, None]
    out = np.zeros_like(v)
    for c in range(v.shape[2]):
        lo, hi = v[:, :, c].min(), v[:, :, c].max()
        if hi > lo:
            out[:, :, c] = (v[:, :, c] - lo) / (hi - lo)
    return ScalarImage(out)


def squared_reference(scene: Scene, model: SimModel) -> ScalarImage:
    """Normalised square of the noiseless scene render (the fluctuation-free G)."""
    n = frame_to_scalar(render_reference(scene, model)).values
    return normalize_unit(n * n)


def score(img, reference: ScalarImage) -> tuple[float, float]:
    """``(ssim, psnr)`` of ``img`` against an already normalised reference."""
    x = normalize_unit(img)
    return ssim(x, reference), psnr(x, reference, 1.0)


def sweep(scene: Scene, model: SimModel, ms: Sequence[int], mode=PairingMode.AC,
          traditional: bool = False, threads=None) -> list[CurvePoint]:
    """Score reconstructions from fresh stacks of each size in ``ms``.

    Each point renders its own stack under a seed derived from the model
    seed and ``m``. With ``traditional=True`` the mean frame is scored
    instead of the correlation image.
    """
    ms = [int(m) for m in ms]
    if not ms:
        raise ValueError("ms must not be empty")
    if any(m < 1 for m in ms) or ms != sorted(ms):
        raise ValueError("ms must be ascending counts >= 1")
    mode = PairingMode.parse(mode)
    ref = squared_reference(scene, model)
    points = []
    for m in ms:
        run = SimModel(model.illumination, model.turbulence, model.sensor,
                       derive_seed(model.seed, m), model.placement, model.frame_shape)
        stack = render_stack(scene, run, m, threads)
        img = mean_image(stack) if traditional else reconstruct_g2(stack, mode, threads)
        s, q = score(img, ref)
        points.append(CurvePoint(m, s, q))
    return points


def curve_csv(points: Iterable[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "ssim", "psnr"])
    for pt in points:
        w.writerow([pt.m, f"{pt.ssim:.6f}", f"{pt.psnr:.6f}"])
    return buf.getvalue()
