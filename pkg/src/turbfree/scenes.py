"""Builtin test scenes."""

import numpy as np

from .types import Scene

# 10x12 block letter Q
_Q_BITMAP = """
..######..
.##....##.
##......##
##......##
##......##
##......##
##......##
##...##.##
##....####
.##....##.
..#######.
........##
"""


def _bitmap(text):
    rows = [r for r in text.strip().splitlines()]
    return np.array([[ch == "#" for ch in r] for r in rows], dtype=np.float64)


def letter(size=64, scale=None):
    """The letter Q, upscaled by ``scale`` (default ``size // 20``) and centred."""
    glyph = _bitmap(_Q_BITMAP)
    if scale is None:
        scale = max(1, size // 20)
    glyph = np.kron(glyph, np.ones((scale, scale)))
    h, w = glyph.shape
    if h > size or w > size:
        raise ValueError(f"glyph of {h}x{w} px does not fit a {size}x{size} scene")
    out = np.zeros((size, size))
    y0, x0 = (size - h) // 2, (size - w) // 2
    out[y0:y0 + h, x0:x0 + w] = glyph
    return out


def bars(size=64, period=None):
    period = period or max(2, size // 8)
    x = np.arange(size)
    row = ((x // (period // 2)) % 2 == 0).astype(np.float64)
    return np.tile(row, (size, 1))


def checker(size=64, period=None):
    period = period or max(2, size // 8)
    y, x = np.mgrid[:size, :size]
    return (((y // (period // 2)) + (x // (period // 2))) % 2 == 0).astype(np.float64)


def color_letter(size=64):
    q = letter(size)
    return np.stack([q, 0.5 * q * bars(size), 0.75 * q], axis=-1)


BUILTIN = {
    "letter": letter,
    "bars": bars,
    "checker": checker,
    "letter-rgb": color_letter,
}


def builtin_scene(name: str, size: int = 64) -> Scene:
    try:
        factory = BUILTIN[name]
    except KeyError:
        raise ValueError(f"unknown builtin scene {name!r}; choose from {sorted(BUILTIN)}") from None
    return Scene(factory(size))
