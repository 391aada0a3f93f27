"""Lossless 16-bit grayscale PNG transport for generated images.

Generator outputs in [-1, 1] are mapped affinely onto the full uint16
range. PNG keeps the payload lossless and deterministic so classifier
readback on the client side matches the server exactly.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image

U16_MAX = 65535


def image_to_png16(arr: np.ndarray) -> bytes:
    arr = np.asarray(arr, dtype=np.float64)
    u16 = np.round((np.clip(arr, -1.0, 1.0) + 1.0) / 2.0 * U16_MAX).astype(np.uint16)
    im = Image.fromarray(u16)
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    return buf.getvalue()


def png16_to_image(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        u16 = np.asarray(im, dtype=np.float64)
    return u16 / U16_MAX * 2.0 - 1.0


def image_to_b64(arr: np.ndarray) -> str:
    return base64.b64encode(image_to_png16(arr)).decode("ascii")


def b64_to_image(payload: str) -> np.ndarray:
    return png16_to_image(base64.b64decode(payload))
