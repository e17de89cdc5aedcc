"""8-bit image reading and writing (binary PGM/PPM by default).

Images are returned as floats in ``[0, 1]``: shape ``(m, n)`` for grayscale
and ``(m, n, 3)`` for RGB. Writing clamps to ``[0, 1]`` and rounds to 8 bits.
"""

from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from ..exceptions import DimensionError

__all__ = ["read_image", "write_image", "load_standin", "STANDINS"]

#: Bundled license-free stand-ins for the two test images of the experiments.
STANDINS = {"gray": "standin_gray256.pgm", "rgb": "standin_rgb256.ppm"}


def _to_float(img):
    if img.mode not in ("L", "RGB"):
        img = img.convert("RGB" if "A" in img.mode or img.mode in ("P", "CMYK", "YCbCr") else "L")
    return np.asarray(img, dtype=float) / 255.0


def read_image(path):
    """Read an image file into a float array scaled to ``[0, 1]``.

    Binary PGM (P5) and PPM (P6) files with optional comment lines are the
    native formats; anything else Pillow can open is accepted too.
    """
    with Image.open(Path(path)) as img:
        img.load()
        return _to_float(img)


def write_image(path, x):
    """Write ``x`` as an 8-bit image, clamped to ``[0, 1]``.

    A 2-D array is written as grayscale, an ``(m, n, 3)`` array as RGB. The
    file type follows the suffix (``.pgm``/``.ppm`` give binary P5/P6).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        mode = "L"
    elif x.ndim == 3 and x.shape[2] == 3:
        mode = "RGB"
    else:
        raise DimensionError(f"expected an (m, n) or (m, n, 3) array, got shape {x.shape}")
    data = np.round(np.clip(x, 0.0, 1.0) * 255.0).astype(np.uint8)
    path = Path(path)
    fmt = "PPM" if path.suffix.lower() in (".pgm", ".ppm", ".pnm") else None
    Image.fromarray(data, mode=mode).save(path, format=fmt)


def load_standin(kind="gray"):
    """Load a bundled 256x256 stand-in test image.

    Parameters
    ----------
    kind : {"gray", "rgb"}
    """
    try:
        name = STANDINS[kind]
    except KeyError:
        raise ValueError(f"unknown stand-in {kind!r}; choose from {sorted(STANDINS)}") from None
    with resources.as_file(resources.files("tvgmks.data") / name) as p:
        return read_image(p)
