"""QR carrier layer.

The QR symbol only moves bytes; it authenticates nothing.  A proof copied
off a screen decodes just as well as the original, which is why freshness
and nonce checks live in the verifier.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np
import segno
import zxingcpp
from PIL import Image, UnidentifiedImageError

from ..errors import QrCapacityError, QrDecodeError
from ..identity import atomic_write
from .qrread import read_matrix, sample_grid

ERROR_LEVELS = ("L", "M", "Q", "H")
DEFAULT_ERROR_CORRECTION = "M"
QUIET_ZONE = 4


@dataclass(frozen=True, eq=False)
class QrPayload:
    """A QR symbol as a square boolean module grid (True = dark, no quiet zone)."""

    modules: np.ndarray
    version: int
    error_correction: str

    @property
    def size(self) -> int:
        return self.modules.shape[0]

    def __eq__(self, other):
        if not isinstance(other, QrPayload):
            return NotImplemented
        return (
            self.version == other.version
            and self.error_correction == other.error_correction
            and np.array_equal(self.modules, other.modules)
        )

    def to_array(self, scale: int = 8, border: int = QUIET_ZONE) -> np.ndarray:
        """Grayscale uint8 raster, 0 for dark modules and 255 for light."""
        if scale < 1 or border < 0:
            raise ValueError("scale must be >= 1 and border >= 0")
        padded = np.pad(self.modules, border, constant_values=False)
        pixels = np.where(padded, 0, 255).astype(np.uint8)
        return pixels.repeat(scale, axis=0).repeat(scale, axis=1)

    def to_image(self, scale: int = 8, border: int = QUIET_ZONE) -> Image.Image:
        return Image.fromarray(self.to_array(scale, border))

    def to_png(self, scale: int = 8, border: int = QUIET_ZONE) -> bytes:
        buf = io.BytesIO()
        self.to_image(scale, border).save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path: str | os.PathLike, scale: int = 8, border: int = QUIET_ZONE) -> None:
        atomic_write(path, self.to_png(scale, border))

    def to_text(self, border: int = 2, invert: bool = False) -> str:
        """Block art, two characters per module.  ``invert`` suits dark terminals."""
        padded = np.pad(self.modules, border, constant_values=False)
        if invert:
            padded = ~padded
        return "\n".join(
            "".join("██" if cell else "  " for cell in row) for row in padded
        ) + "\n"


def qr_encode(payload: bytes, error_correction: str = DEFAULT_ERROR_CORRECTION) -> QrPayload:
    """Encode ``payload`` in byte mode using the smallest version that fits."""
    level = error_correction.upper()
    if level not in ERROR_LEVELS:
        raise ValueError(f"error_correction must be one of {ERROR_LEVELS}")
    try:
        symbol = segno.make(
            bytes(payload), error=level, mode="byte", boost_error=False, micro=False
        )
    except segno.DataOverflowError as exc:
        raise QrCapacityError(
            f"{len(payload)} bytes do not fit a version-40 symbol at level {level}"
        ) from exc
    modules = np.array(symbol.matrix, dtype=bool)
    return QrPayload(modules=modules, version=symbol.version, error_correction=level)


def _load_gray(source) -> np.ndarray:
    if isinstance(source, np.ndarray):
        arr = source
        if arr.ndim == 3:
            arr = np.asarray(Image.fromarray(arr.astype(np.uint8)).convert("L"))
        return arr
    try:
        if isinstance(source, Image.Image):
            img = source
        elif isinstance(source, (bytes, bytearray)):
            img = Image.open(io.BytesIO(source))
        else:
            img = Image.open(source)
        return np.asarray(img.convert("L"))
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise QrDecodeError(f"cannot load image: {exc}") from exc


def qr_decode(source) -> bytes:
    """Recover payload bytes from a QrPayload, an image, PNG bytes, or an image path."""
    if isinstance(source, QrPayload):
        return read_matrix(source.modules)
    gray = _load_gray(source)
    if gray.ndim != 2 or gray.size == 0:
        raise QrDecodeError("expected a grayscale or RGB image")
    results = zxingcpp.read_barcodes(
        np.ascontiguousarray(gray, dtype=np.uint8), formats=zxingcpp.BarcodeFormat.QRCode
    )
    for result in results:
        if result.valid:
            return bytes(result.bytes)
    # camera-oriented decoders skip some synthetic symbols, e.g. an empty payload
    try:
        return read_matrix(sample_grid(gray))
    except QrDecodeError:
        raise
    except (ValueError, IndexError) as exc:
        raise QrDecodeError(f"no QR symbol found: {exc}") from exc
