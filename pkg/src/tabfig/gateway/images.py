"""Image payload preprocessing: enforce pixel bounds, encode for the wire."""

from __future__ import annotations

import base64
import io

from PIL import Image

DEFAULT_MAX = (1024, 1024)
DEFAULT_MIN = (128, 128)


def fit_image(
    source: str | bytes,
    min_px: tuple[int, int] = DEFAULT_MIN,
    max_px: tuple[int, int] = DEFAULT_MAX,
) -> Image.Image:
    """Load an image and rescale it into [min_px, max_px], keeping aspect.

    Oversized images are downscaled to fit inside max_px; undersized ones
    are upscaled until both dimensions reach min_px.
    """
    img = Image.open(io.BytesIO(source) if isinstance(source, bytes) else source)
    img.load()
    w, h = img.size
    scale = min(max_px[0] / w, max_px[1] / h, 1.0)
    if scale < 1.0:
        w, h = max(1, int(w * scale)), max(1, int(h * scale))
    up = max(min_px[0] / w, min_px[1] / h, 1.0)
    if up > 1.0:
        w, h = int(round(w * up)), int(round(h * up))
    w = min(max(w, min_px[0]), max_px[0])
    h = min(max(h, min_px[1]), max_px[1])
    if (w, h) != img.size:
        img = img.resize((w, h))
    assert min_px[0] <= img.size[0] <= max_px[0], img.size
    assert min_px[1] <= img.size[1] <= max_px[1], img.size
    return img


def to_data_url(img: Image.Image) -> str:
    buf = io.BytesIO()
    img.convert("RGB").save(buf, format="PNG")
    encoded = base64.b64encode(buf.getvalue()).decode("ascii")
    return f"data:image/png;base64,{encoded}"
