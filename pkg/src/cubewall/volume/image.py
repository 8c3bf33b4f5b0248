"""Frame images: the RGBA output surface served to display clients, plus PNG
encoding and the ID/address labelling stamped into frame margins."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from ..errors import ArgumentError

__all__ = ["FrameImage", "encode_png", "stamp_label", "placeholder_frame"]

LABEL_FILL = (255, 210, 80, 255)
PLACEHOLDER_BG = (14, 16, 22, 255)
PLACEHOLDER_FG = (90, 100, 120, 255)


@dataclass(frozen=True)
class FrameImage:
    """RGBA pixels, row-major with the top row first."""

    width: int
    height: int
    pixels: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ArgumentError(
                f"frame must be at least 1x1, got {self.width}x{self.height}"
            )
        if len(self.pixels) != 4 * self.width * self.height:
            raise ArgumentError(
                f"pixel buffer has {len(self.pixels)} bytes, expected "
                f"{4 * self.width * self.height}"
            )

    @classmethod
    def from_array(cls, rgba: np.ndarray) -> "FrameImage":
        """Build from an (h, w, 4) uint8 array."""
        if rgba.ndim != 3 or rgba.shape[2] != 4 or rgba.dtype != np.uint8:
            raise ArgumentError("expected an (h, w, 4) uint8 array")
        h, w = rgba.shape[:2]
        return cls(width=w, height=h, pixels=np.ascontiguousarray(rgba).tobytes())

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(
            self.height, self.width, 4
        )


def encode_png(img: FrameImage) -> bytes:
    """Encode as a standard 8-bit RGBA PNG (lossless)."""
    pil = Image.frombytes("RGBA", (img.width, img.height), img.pixels)
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def stamp_label(img: FrameImage, text: str) -> FrameImage:
    """Stamp a text label into the top-left margin of a frame."""
    pil = Image.frombytes("RGBA", (img.width, img.height), img.pixels)
    draw = ImageDraw.Draw(pil)
    draw.text((3, 2), text, fill=LABEL_FILL)
    return FrameImage(width=img.width, height=img.height, pixels=pil.tobytes())


def placeholder_frame(width: int, height: int, label: str) -> FrameImage:
    """Blank panel frame carrying its grid address, shown when no cube is
    loaded."""
    pil = Image.new("RGBA", (width, height), PLACEHOLDER_BG)
    draw = ImageDraw.Draw(pil)
    draw.rectangle([0, 0, width - 1, height - 1], outline=PLACEHOLDER_FG)
    draw.text((width // 2 - 4 * len(label), height // 2 - 5), label,
              fill=PLACEHOLDER_FG)
    return FrameImage(width=width, height=height, pixels=pil.tobytes())
