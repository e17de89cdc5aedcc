"""Regenerate the bundled stand-in images from scikit-image sample data.

Both sources are public-domain sample images shipped with scikit-image
(``camera`` and ``astronaut``); they are resized to 256x256 and written as
8-bit binary PGM/PPM. scikit-image is only needed to run this script.
"""

from pathlib import Path

from skimage import data, transform

from tvgmks.experiments.imageio import STANDINS, write_image

out = Path(__file__).resolve().parents[1] / "src" / "tvgmks" / "data"
gray = transform.resize(data.camera() / 255.0, (256, 256), anti_aliasing=True)
rgb = transform.resize(data.astronaut() / 255.0, (256, 256, 3), anti_aliasing=True)
write_image(out / STANDINS["gray"], gray)
write_image(out / STANDINS["rgb"], rgb)
print("wrote", out / STANDINS["gray"], "and", out / STANDINS["rgb"])
