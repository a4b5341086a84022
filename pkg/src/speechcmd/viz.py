"""Feature-map rendering as binary portable pixmaps (P6).

PPM is the simplest image format that can be specified bit-for-bit, so
renders are reproducible without any imaging dependency. The color ramp
is a fixed 256-entry viridis-like gradient.
"""

from __future__ import annotations

import numpy as np

_ANCHORS = np.array(
    [
        (0.267004, 0.004874, 0.329415),
        (0.282623, 0.140926, 0.457517),
        (0.253935, 0.265254, 0.529983),
        (0.206756, 0.371758, 0.553117),
        (0.163625, 0.471133, 0.558148),
        (0.127568, 0.566949, 0.550556),
        (0.134692, 0.658636, 0.517649),
        (0.266941, 0.748751, 0.440573),
        (0.477504, 0.821444, 0.318195),
        (0.741388, 0.873449, 0.149561),
        (0.993248, 0.906157, 0.143936),
    ]
)


def color_ramp() -> np.ndarray:
    """256 x 3 uint8 gradient interpolated between the viridis anchors."""
    x = np.linspace(0.0, 1.0, 256)
    xp = np.linspace(0.0, 1.0, len(_ANCHORS))
    rgb = np.stack([np.interp(x, xp, _ANCHORS[:, c]) for c in range(3)], axis=1)
    return np.clip(np.rint(rgb * 255), 0, 255).astype(np.uint8)


def render_ppm(values: np.ndarray) -> bytes:
    """Encode a 2D array as a P6 pixmap, low rows at the image bottom."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("render_ppm expects a 2D array")
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        norm = (values - lo) / (hi - lo)
    else:
        norm = np.zeros_like(values)
    indices = np.clip(np.rint(norm * 255), 0, 255).astype(np.uint8)
    pixels = color_ramp()[indices[::-1, :]]  # flip so bin 0 renders at the bottom
    height, width = values.shape
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def save_ppm(path, values: np.ndarray) -> None:
    with open(path, "wb") as f:
        f.write(render_ppm(values))
