"""Stack files, PGM/PPM/PNG frames and run configuration files.

Stack file layout (all little-endian)::

    offset  size  field
    0       4     magic b"TFIS"
    4       2     version (u16) = 1
    6       4     width (u32)
    10      4     height (u32)
    14      4     frames (u32)
    18      1     channels (u8, 1 or 3)
    19      1     bit depth (u8, 8 or 16)
    20      2     reserved, zero
    22      ...   samples, frame-major, then row-major, channels interleaved
"""

from __future__ import annotations

import fnmatch
import os
import struct
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import png

from .errors import (BadMagic, ConfigError, EmptyStack, NoFrames, ShapeMismatch,
                     TruncatedPayload, UnsupportedBitDepth, UnsupportedFormat)
from .reconstruct import PairingMode
from .scenes import BUILTIN, builtin_scene
from .sim import (IlluminationModel, Placement, SensorModel, SimModel,
                  TurbulenceModel)
from .types import Frame, FrameStack, Scene, validate_stack

MAGIC = b"TFIS"
VERSION = 1
_HEADER = struct.Struct("<4sHIIIBB2x")
HEADER_SIZE = _HEADER.size

IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm", ".png")


def _sample_dtype(bit_depth):
    return np.dtype(np.uint8) if bit_depth == 8 else np.dtype("<u2")


# -- stack files ---------------------------------------------------------------

def encode_stack(stack: FrameStack) -> bytes:
    validate_stack(stack)
    h, w, c = stack.shape
    bd = stack.bit_depth
    header = _HEADER.pack(MAGIC, VERSION, w, h, stack.m, c, bd)
    return header + stack.to_array().astype(_sample_dtype(bd)).tobytes()


def decode_stack(data: bytes, name="<bytes>") -> FrameStack:
    if len(data) < HEADER_SIZE:
        raise TruncatedPayload(f"{name}: file too short for a stack header ({len(data)} bytes)")
    magic, version, w, h, m, c, bd = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"{name}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise BadMagic(f"{name}: unsupported stack version {version}")
    if bd not in (8, 16):
        raise UnsupportedBitDepth(f"{name}: bit depth {bd} not supported")
    if c not in (1, 3):
        raise UnsupportedFormat(f"{name}: {c} channels not supported")
    if data[20:22] != b"\0\0":
        raise BadMagic(f"{name}: reserved header bytes are not zero")
    if m == 0:
        raise EmptyStack()
    if w == 0 or h == 0:
        raise UnsupportedFormat(f"{name}: zero-sized frames")
    dtype = _sample_dtype(bd)
    expected = m * h * w * c * dtype.itemsize
    payload = len(data) - HEADER_SIZE
    if payload != expected:
        raise TruncatedPayload(
            f"{name}: header declares {m} frames of {w}x{h}x{c} at {bd} bits "
            f"({expected} bytes) but payload holds {payload} bytes"
        )
    counts = np.frombuffer(data, dtype=dtype, offset=HEADER_SIZE).reshape(m, h, w, c)
    return FrameStack.from_array(counts.astype(dtype.newbyteorder("=")), bd)


def write_stack(stack: FrameStack, path) -> None:
    Path(path).write_bytes(encode_stack(stack))


def read_stack(path) -> FrameStack:
    return decode_stack(Path(path).read_bytes(), str(path))


# -- single images -------------------------------------------------------------

def _pnm_tokens(data, count):
    """Parse ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, i = [], 0
    while len(tokens) < count:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        if j == i:
            raise UnsupportedFormat("truncated PNM header")
        tokens.append(data[i:j])
        i = j
    return tokens, i + 1  # exactly one whitespace byte precedes the raster


def _read_pnm(path) -> Frame:
    data = Path(path).read_bytes()
    tokens, offset = _pnm_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormat(f"{path}: only binary PGM (P5) and PPM (P6) are supported")
    w, h, maxval = (int(t) for t in tokens[1:])
    channels = 1 if magic == b"P5" else 3
    if not 0 < maxval < 65536:
        raise UnsupportedFormat(f"{path}: invalid maxval {maxval}")
    bd = 8 if maxval < 256 else 16
    dtype = np.dtype(np.uint8) if bd == 8 else np.dtype(">u2")
    n = w * h * channels
    raster = data[offset:offset + n * dtype.itemsize]
    if len(raster) != n * dtype.itemsize:
        raise TruncatedPayload(f"{path}: raster is shorter than {w}x{h}x{channels}")
    counts = np.frombuffer(raster, dtype=dtype).reshape(h, w, channels)
    return Frame(counts.astype(np.uint8 if bd == 8 else np.uint16), bd)


def _read_png(path) -> Frame:
    try:
        w, h, rows, info = png.Reader(filename=str(path)).asDirect()
    except png.FormatError as exc:
        raise UnsupportedFormat(f"{path}: {exc}") from None
    bd = info["bitdepth"]
    if bd not in (8, 16):
        raise UnsupportedFormat(f"{path}: {bd}-bit PNG samples are not supported")
    planes = info["planes"]
    a = np.vstack([np.asarray(r, dtype=np.uint16) for r in rows]).reshape(h, w, planes)
    if info["alpha"]:
        a = a[:, :, :-1]
    return Frame(a.astype(np.uint8 if bd == 8 else np.uint16), bd)


def read_image(path) -> Frame:
    suffix = Path(path).suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        return _read_pnm(path)
    if suffix == ".png":
        return _read_png(path)
    raise UnsupportedFormat(f"{path}: unsupported image type {suffix!r}")


def write_image(frame: Frame, path) -> None:
    """Write a frame as PGM/PPM (by suffix ``.pgm``/``.ppm``/``.pnm``) or PNG."""
    path = Path(path)
    suffix = path.suffix.lower()
    h, w, c = frame.shape
    if suffix in (".pgm", ".ppm", ".pnm"):
        magic = b"P5" if c == 1 else b"P6"
        header = magic + f"\n{w} {h}\n{frame.max_count}\n".encode()
        dtype = np.uint8 if frame.bit_depth == 8 else ">u2"
        path.write_bytes(header + frame.counts.astype(dtype).tobytes())
    elif suffix == ".png":
        writer = png.Writer(w, h, greyscale=(c == 1), bitdepth=frame.bit_depth)
        with open(path, "wb") as f:
            sample = np.uint8 if frame.bit_depth == 8 else np.uint16
            writer.write(f, frame.counts.reshape(h, w * c).astype(sample))
    else:
        raise UnsupportedFormat(f"{path}: unsupported image type {suffix!r}")


def import_frames(directory, pattern=None) -> FrameStack:
    """Load numbered frame files from ``directory`` in lexicographic order.

    Without ``pattern`` every file with a PGM/PPM/PNG suffix is taken; with
    a glob ``pattern`` every matching file must be a supported image.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise NoFrames(f"{directory}: not a directory")
    names = sorted(os.listdir(directory))
    if pattern is None:
        names = [n for n in names if Path(n).suffix.lower() in IMAGE_SUFFIXES]
    else:
        names = fnmatch.filter(names, pattern)
    paths = [directory / n for n in names if (directory / n).is_file()]
    if not paths:
        raise NoFrames(f"{directory}: no frame files match {pattern or 'PGM/PPM/PNG'}")
    frames = [read_image(p) for p in paths]
    first = frames[0]
    for alpha, (frame, p) in enumerate(zip(frames, paths), start=1):
        if frame.bit_depth != first.bit_depth:
            raise UnsupportedFormat(
                f"{p}: {frame.bit_depth}-bit frame mixed with {first.bit_depth}-bit frames")
        if frame.shape != first.shape:
            raise ShapeMismatch(alpha, f"{p} is {frame.shape}, expected {first.shape}")
    return FrameStack(tuple(frames))


def load_scene(path) -> Scene:
    """Scene reflectance from an image file, scaled by the full count range."""
    frame = read_image(path)
    return Scene(frame.counts / float(frame.max_count))


# -- run configuration ---------------------------------------------------------

PRESETS = {"standard": 100, "color": 50, "quick": 20}


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _ms(text):
    return tuple(int(t) for t in text.replace(" ", "").split(",") if t)


@dataclass
class RunConfig:
    """Flat ``key = value`` run description. Every key is optional."""

    scene: str = "letter"
    scene_size: int = 64
    mean_intensity: float = 200.0
    coherence_cells: int = 4
    fluctuating: bool = True
    jitter_sigma: float = 2.0
    blur_sigma_min: float = 0.5
    blur_sigma_max: float = 2.5
    gain_sigma: float = 0.0
    placement: str = "post"
    quantum_efficiency: float = 1.0
    shot_noise: bool = True
    read_noise_sigma: float = 0.0
    bit_depth: int = 8
    seed: int = 0
    mode: str = "ac"
    preset: str = "standard"
    m: int | None = None
    ms: tuple = (1, 5, 10, 20, 50, 100)
    stack: str = "stack.tfis"
    frames_dir: str = ""
    image: str = "g2.png"
    mean_image: str = ""
    csv: str = "curve.csv"
    _explicit: set = field(default_factory=set, repr=False, compare=False)

    _PARSERS = {bool: _bool, int: int, float: float, str: str.strip}

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls) if not f.name.startswith("_")]

    @classmethod
    def parse(cls, text: str, name="<config>") -> "RunConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{name}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                cfg.set(key, value)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"{name}:{lineno}: {exc}") from None
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.parse(Path(path).read_text(), str(path))

    def set(self, key, value: str):
        if key not in self.keys():
            raise ConfigError(f"unknown key {key!r}")
        if key == "ms":
            parsed = _ms(value)
        elif key == "m":
            parsed = int(value)
        else:
            default = getattr(type(self), key)
            parsed = self._PARSERS[type(default)](value)
        setattr(self, key, parsed)
        self._explicit.add(key)

    def check(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}")
        if self.placement not in {p.value for p in Placement}:
            raise ConfigError(f"placement must be pre, post or both, got {self.placement!r}")
        try:
            PairingMode.parse(self.mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.frames < 1:
            raise ConfigError(f"m must be >= 1, got {self.frames}")
        try:
            self.sim_model()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def frames(self) -> int:
        return self.m if self.m is not None else PRESETS[self.preset]

    def sim_model(self) -> SimModel:
        return SimModel(
            IlluminationModel(self.mean_intensity, self.coherence_cells, self.fluctuating),
            TurbulenceModel(self.jitter_sigma, (self.blur_sigma_min, self.blur_sigma_max),
                            self.gain_sigma),
            SensorModel(self.quantum_efficiency, self.shot_noise, self.read_noise_sigma,
                        self.bit_depth),
            self.seed,
            Placement(self.placement),
        )

    def load_scene(self) -> Scene:
        if self.scene in BUILTIN:
            return builtin_scene(self.scene, self.scene_size)
        return load_scene(self.scene)
