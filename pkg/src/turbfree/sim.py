"""Synthetic sunlight / turbulence / camera simulator.

A frame is rendered as::

    illumination (pseudothermal speckle)  -> [turbulence, pre-object]
    x scene reflectance                   -> [turbulence, post-object]
    -> sensor (quantum efficiency, Poisson shot noise, read noise, clamp)

Turbulence is geometric: a per-frame random translation (tip/tilt), a
Gaussian blur of random width and a multiplicative gain. Each frame and
stage draws from its own substream (see :mod:`turbfree.rng`).
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from ._backend import resolve_threads
from .errors import BadDimensions
from .rng import Stage, substream
from .types import Frame, FrameStack, ScalarImage, Scene


class Placement(enum.Enum):
    PRE = "pre"
    POST = "post"
    BOTH = "both"


@dataclass(frozen=True)
class IlluminationModel:
    mean_intensity: float = 200.0
    coherence_cells: int = 4
    fluctuating: bool = True

    def __post_init__(self):
        if not self.mean_intensity > 0:
            raise ValueError("mean_intensity must be > 0")
        if int(self.coherence_cells) != self.coherence_cells or self.coherence_cells < 1:
            raise ValueError("coherence_cells must be an integer >= 1")


@dataclass(frozen=True)
class TurbulenceModel:
    jitter_sigma: float = 2.0
    blur_sigma_range: tuple[float, float] = (0.5, 2.5)
    gain_sigma: float = 0.0

    def __post_init__(self):
        lo, hi = self.blur_sigma_range
        object.__setattr__(self, "blur_sigma_range", (float(lo), float(hi)))
        if self.jitter_sigma < 0 or self.gain_sigma < 0:
            raise ValueError("turbulence parameters must be >= 0")
        if not 0 <= lo <= hi:
            raise ValueError("blur_sigma_range must satisfy 0 <= lo <= hi")

    @classmethod
    def off(cls) -> "TurbulenceModel":
        return cls(0.0, (0.0, 0.0), 0.0)


@dataclass(frozen=True)
class SensorModel:
    quantum_efficiency: float = 1.0
    shot_noise: bool = True
    read_noise_sigma: float = 0.0
    bit_depth: int = 8

    def __post_init__(self):
        if not 0 < self.quantum_efficiency <= 1:
            raise ValueError("quantum_efficiency must lie in (0, 1]")
        if self.read_noise_sigma < 0:
            raise ValueError("read_noise_sigma must be >= 0")
        if self.bit_depth not in (8, 16):
            raise ValueError("bit_depth must be 8 or 16")


@dataclass(frozen=True)
class SimModel:
    illumination: IlluminationModel = field(default_factory=IlluminationModel)
    turbulence: TurbulenceModel = field(default_factory=TurbulenceModel)
    sensor: SensorModel = field(default_factory=SensorModel)
    seed: int = 0
    placement: Placement = Placement.POST
    # expected (height, width); None accepts any scene
    frame_shape: tuple[int, int] | None = None

    @classmethod
    def all_off(cls, mean_intensity=200.0, bit_depth=8, seed=0) -> "SimModel":
        """No fluctuation, no turbulence, no noise, unit quantum efficiency."""
        return cls(
            IlluminationModel(mean_intensity, 1, False),
            TurbulenceModel.off(),
            SensorModel(1.0, False, 0.0, bit_depth),
            seed,
        )

    def noiseless(self) -> "SimModel":
        """Same illumination level and sensor range with every random effect off."""
        return replace(
            self,
            illumination=replace(self.illumination, fluctuating=False),
            turbulence=TurbulenceModel.off(),
            sensor=replace(self.sensor, shot_noise=False, read_noise_sigma=0.0),
        )


@dataclass(frozen=True)
class Distortion:
    """One frame's drawn turbulence parameters."""

    dx: float
    dy: float
    blur_sigma: float
    gain: float


def _generator(rng, frame_index, stage):
    if isinstance(rng, np.random.Generator):
        return rng
    return substream(int(rng), frame_index, stage)


def speckle_cells(model: IlluminationModel, shape, rng) -> np.ndarray:
    """Coarse grid of i.i.d. exponential intensities, one per coherence cell node."""
    h, w = shape
    c = int(model.coherence_cells)
    gh, gw = -(-h // c) + 1, -(-w // c) + 1
    return rng.exponential(model.mean_intensity, size=(gh, gw))


def _upsample(coarse, shape, cell):
    h, w = shape
    y = np.arange(h) / cell
    x = np.arange(w) / cell
    y0 = np.floor(y).astype(int)
    x0 = np.floor(x).astype(int)
    fy = (y - y0)[:, None]
    fx = (x - x0)[None, :]
    a = coarse[np.ix_(y0, x0)]
    b = coarse[np.ix_(y0, x0 + 1)]
    c = coarse[np.ix_(y0 + 1, x0)]
    d = coarse[np.ix_(y0 + 1, x0 + 1)]
    return (1 - fy) * ((1 - fx) * a + fx * b) + fy * ((1 - fx) * c + fx * d)


def gen_illumination(model: IlluminationModel, shape, frame_index=0, rng=0) -> ScalarImage:
    """Illumination pattern for one frame, shape ``(height, width)``.

    ``rng`` is a Generator, or a master seed from which the frame's
    illumination substream is derived.
    """
    h, w = shape
    if not model.fluctuating:
        return ScalarImage(np.full((h, w), float(model.mean_intensity)))
    gen = _generator(rng, frame_index, Stage.ILLUMINATION)
    coarse = speckle_cells(model, shape, gen)
    return ScalarImage(_upsample(coarse, shape, int(model.coherence_cells)))


def draw_distortion(model: TurbulenceModel, rng) -> Distortion:
    # draw order is fixed regardless of which parameters are zero
    dx = float(rng.normal(0.0, model.jitter_sigma))
    dy = float(rng.normal(0.0, model.jitter_sigma))
    sigma = float(rng.uniform(*model.blur_sigma_range))
    gain = max(0.0, 1.0 + float(rng.normal(0.0, model.gain_sigma)))
    return Distortion(dx, dy, sigma, gain)


def _shift_int(a, oy, ox):
    """``b[y, x] = a[y + oy, x + ox]``, zero outside."""
    h, w = a.shape[:2]
    b = np.zeros_like(a)
    ys, ye = max(0, -oy), min(h, h - oy)
    xs, xe = max(0, -ox), min(w, w - ox)
    if ys < ye and xs < xe:
        b[ys:ye, xs:xe] = a[ys + oy:ye + oy, xs + ox:xe + ox]
    return b


def translate(a: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """Bilinear translation by ``(dx, dy)`` pixels with zero fill."""
    if dx == 0.0 and dy == 0.0:
        return a.copy()
    # output(y, x) samples input(y - dy, x - dx)
    sy, sx = -dy, -dx
    iy, ix = int(np.floor(sy)), int(np.floor(sx))
    fy, fx = sy - iy, sx - ix
    return ((1 - fy) * ((1 - fx) * _shift_int(a, iy, ix) + fx * _shift_int(a, iy, ix + 1))
            + fy * ((1 - fx) * _shift_int(a, iy + 1, ix) + fx * _shift_int(a, iy + 1, ix + 1)))


def distort(values: np.ndarray, d: Distortion) -> np.ndarray:
    out = translate(values, d.dx, d.dy)
    if d.blur_sigma > 0:
        out = ndimage.gaussian_filter(out, sigma=(d.blur_sigma, d.blur_sigma, 0),
                                      mode="constant", cval=0.0)
    if d.gain != 1.0:
        out = out * d.gain
    return np.maximum(out, 0.0)


def apply_turbulence(img: ScalarImage, model: TurbulenceModel, frame_index=0, rng=0,
                     stage=Stage.TURBULENCE_POST) -> ScalarImage:
    """Jitter, blur and scale one frame's intensity image."""
    gen = _generator(rng, frame_index, stage)
    return ScalarImage(distort(img.values, draw_distortion(model, gen)))


def sense(expected: ScalarImage, model: SensorModel, rng) -> Frame:
    """Convert expected photon numbers into clamped integer counts."""
    lam = model.quantum_efficiency * expected.values
    if model.shot_noise:
        counts = rng.poisson(lam).astype(np.float64)
    else:
        counts = np.rint(lam)
    if model.read_noise_sigma > 0:
        counts = counts + np.rint(rng.normal(0.0, model.read_noise_sigma, size=lam.shape))
    top = 2 ** model.bit_depth - 1
    counts = np.clip(counts, 0, top)
    dtype = np.uint8 if model.bit_depth == 8 else np.uint16
    return Frame(counts.astype(dtype), model.bit_depth)


def render_frame(scene: Scene, model: SimModel, alpha: int) -> Frame:
    """Render frame ``alpha`` (0-based); depends only on the seed and ``alpha``."""
    h, w = scene.height, scene.width
    ill = gen_illumination(model.illumination, (h, w), alpha, model.seed)
    if model.placement in (Placement.PRE, Placement.BOTH):
        ill = apply_turbulence(ill, model.turbulence, alpha, model.seed, Stage.TURBULENCE_PRE)
    expected = ScalarImage(scene.reflectance * ill.values)
    if model.placement in (Placement.POST, Placement.BOTH):
        expected = apply_turbulence(expected, model.turbulence, alpha, model.seed,
                                    Stage.TURBULENCE_POST)
    return sense(expected, model.sensor, substream(model.seed, alpha, Stage.SENSOR))


def render_stack(scene: Scene, model: SimModel, m: int, threads=None) -> FrameStack:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if model.frame_shape is not None and tuple(model.frame_shape) != (scene.height, scene.width):
        raise BadDimensions(
            f"scene is {scene.height}x{scene.width}, model expects "
            f"{model.frame_shape[0]}x{model.frame_shape[1]}"
        )
    workers = min(resolve_threads(threads), m)
    if workers == 1:
        frames = [render_frame(scene, model, a) for a in range(m)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            frames = list(pool.map(lambda a: render_frame(scene, model, a), range(m)))
    return FrameStack(tuple(frames))


def render_reference(scene: Scene, model: SimModel) -> Frame:
    """Noiseless, undistorted single render of ``scene`` at the model's light level."""
    return render_frame(scene, model.noiseless(), 0)
