"""Procedural tile rendering.

Each category has a fixed geometric base pattern drawn in dark gray on
a light background. Distortion is applied in a fixed order: additive
gaussian noise, then a seeded occlusion mask, then a sinusoidal
horizontal warp. Identical TileSpec always yields a byte-identical
bitmap.
"""

from __future__ import annotations

import io

import numpy as np

from ..rng import SplitMix64, derive, fill_gauss, fill_u64
from .grid import TileCategory, TileSpec

VALID_SIZES = (32, 64, 128)
DEFAULT_SIZE = 64

BG_LEVEL = 220
FG_LEVEL = 35

# two full sine cycles across the tile height
_WARP_CYCLES = 2.0


def _base_pattern(category: TileCategory, size: int) -> np.ndarray:
    s = float(size)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    c = (s - 1.0) / 2.0

    if category is TileCategory.CIRCLE:
        mask = (x - c) ** 2 + (y - c) ** 2 <= (0.34 * s) ** 2
    elif category is TileCategory.SQUARE:
        lo, hi = round(0.2 * s), round(0.8 * s)
        mask = (x >= lo) & (x < hi) & (y >= lo) & (y < hi)
    elif category is TileCategory.TRIANGLE:
        # filled isoceles triangle, apex up
        top, bottom = 0.15 * s, 0.85 * s
        half_span = 0.35 * s
        frac = np.clip((y - top) / (bottom - top), 0.0, 1.0)
        mask = (y >= top) & (y <= bottom) & (np.abs(x - c) <= frac * half_span)
    elif category is TileCategory.STRIPES:
        width = max(size // 8, 1)
        mask = (x.astype(np.int64) // width) % 2 == 0
    elif category is TileCategory.CHECKER:
        cell = max(size // 4, 1)
        mask = ((x.astype(np.int64) // cell) + (y.astype(np.int64) // cell)) % 2 == 0
    elif category is TileCategory.CROSS:
        bar = 0.12 * s
        mask = (np.abs(x - c) <= bar) | (np.abs(y - c) <= bar)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown category {category}")

    img = np.full((size, size), BG_LEVEL, dtype=np.float64)
    img[mask] = FG_LEVEL
    return img


def render_tile(spec: TileSpec, size: int = DEFAULT_SIZE) -> np.ndarray:
    """Render a tile to size x size uint8 grayscale."""
    if size not in VALID_SIZES:
        raise ValueError(f"tile size must be one of {VALID_SIZES}, got {size}")

    img = _base_pattern(spec.category, size)
    d = spec.distortion

    if d.noise_sigma > 0.0:
        noise = fill_gauss(derive(spec.seed, "noise"), size * size) * (d.noise_sigma * 255.0)
        img = img + noise.reshape(size, size)
    img = np.clip(np.rint(img), 0, 255)

    n_occluded = int(round(d.occlusion_fraction * size * size))
    if n_occluded > 0:
        u = fill_u64(derive(spec.seed, "occlusion"), size * size)
        blanked = np.argsort(u, kind="stable")[:n_occluded]
        flat = img.reshape(-1)
        flat[blanked] = 0
        img = flat.reshape(size, size)

    if d.warp_amplitude > 0.0:
        phase = SplitMix64(derive(spec.seed, "warp")).next_float() * 2.0 * np.pi
        rows = np.arange(size, dtype=np.float64)
        shifts = np.rint(
            d.warp_amplitude * np.sin(2.0 * np.pi * _WARP_CYCLES * rows / size + phase)
        ).astype(np.int64)
        out = np.empty_like(img)
        for r in range(size):
            out[r] = np.roll(img[r], shifts[r])
        img = out

    return img.astype(np.uint8)


def to_pgm(img: np.ndarray) -> bytes:
    """Binary PGM (P5, maxval 255)."""
    h, w = img.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return header + img.astype(np.uint8).tobytes()


def from_pgm(data: bytes) -> np.ndarray:
    """Parse the P5 subset written by to_pgm (also tolerates comments)."""
    buf = io.BytesIO(data)
    fields: list[bytes] = []
    while len(fields) < 4:
        tok = b""
        ch = buf.read(1)
        while ch.isspace():
            ch = buf.read(1)
        if ch == b"#":
            buf.readline()
            continue
        while ch and not ch.isspace():
            tok += ch
            ch = buf.read(1)
        if not tok:
            raise ValueError("truncated PGM header")
        fields.append(tok)
    if fields[0] != b"P5":
        raise ValueError(f"not a binary PGM: magic {fields[0]!r}")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    raster = buf.read(w * h)
    if len(raster) != w * h:
        raise ValueError("truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w)


def to_png(img: np.ndarray) -> bytes:
    """Optional PNG export; requires Pillow."""
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - Pillow present in dev env
        raise RuntimeError("PNG export requires Pillow") from exc
    buf = io.BytesIO()
    Image.fromarray(img, mode="L").save(buf, format="PNG")
    return buf.getvalue()
