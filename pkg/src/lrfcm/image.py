"""Image containers, symmetric padding and Netpbm/PNG file I/O.

Gray images are 2-D ``float64`` arrays of shape ``(height, width)``;
color images are ``(height, width, 3)`` arrays holding R, G, B planes.
Intensities are real numbers on the nominal [0, 255] scale and are only
quantized when written to disk.
"""

from __future__ import annotations

import os
import re

import numpy as np

from .errors import FormatError

_NETPBM_MAGIC = {b"P2": (1, False), b"P3": (3, False), b"P5": (1, True), b"P6": (3, True)}


def as_gray(img) -> np.ndarray:
    """Validate and return ``img`` as a finite 2-D float array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"gray image must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("gray image contains NaN or Inf")
    return arr


def as_color(img) -> np.ndarray:
    """Validate and return ``img`` as a finite ``(h, w, 3)`` float array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"color image must have shape (h, w, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("color image contains NaN or Inf")
    return arr


def is_color(img) -> bool:
    return np.ndim(img) == 3


def channels(img) -> list[np.ndarray]:
    """Split an image into its gray channels (one for gray, three for RGB)."""
    if is_color(img):
        arr = as_color(img)
        return [arr[:, :, k] for k in range(3)]
    return [as_gray(img)]


def pad_symmetric(img, margin: int) -> np.ndarray:
    """Whole-sample symmetric extension: ``[1, 2, 3]`` -> ``[1, 1, 2, 3, 3]``."""
    arr = as_gray(img)
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if margin > min(arr.shape):
        raise ValueError(f"margin {margin} exceeds image side {min(arr.shape)}; reflection undefined")
    return np.pad(arr, margin, mode="symmetric")


def quantize(img) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero, as done on write."""
    arr = np.clip(np.asarray(img, dtype=np.float64), 0.0, 255.0)
    return np.floor(arr + 0.5).astype(np.uint8)


# ---------------------------------------------------------------- reading


def _netpbm_header(buf: bytes):
    """Parse magic/width/height/maxval; return them and the data offset."""
    magic = buf[:2]
    if magic not in _NETPBM_MAGIC:
        raise FormatError(f"unsupported magic number {magic!r}", offset=0)
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and comments
        while pos < len(buf):
            ch = buf[pos : pos + 1]
            if ch.isspace():
                pos += 1
            elif ch == b"#":
                nl = buf.find(b"\n", pos)
                pos = len(buf) if nl < 0 else nl + 1
            else:
                break
        m = re.compile(rb"\d+").match(buf, pos)
        if m is None:
            raise FormatError("expected a decimal header field", offset=pos)
        fields.append(int(m.group()))
        pos = m.end()
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"invalid dimensions {width}x{height}", offset=pos)
    if not 1 <= maxval <= 65535:
        raise FormatError(f"maxval {maxval} outside [1, 65535]", offset=pos)
    if pos >= len(buf) or not buf[pos : pos + 1].isspace():
        raise FormatError("missing whitespace after header", offset=pos)
    return magic, width, height, maxval, pos + 1


def _read_netpbm(buf: bytes) -> np.ndarray:
    magic, width, height, maxval, start = _netpbm_header(buf)
    nchan, binary = _NETPBM_MAGIC[magic]
    count = width * height * nchan
    if binary:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        nbytes = count * dtype.itemsize
        if len(buf) - start < nbytes:
            raise FormatError(f"raster truncated: need {nbytes} bytes, have {len(buf) - start}", offset=start)
        values = np.frombuffer(buf, dtype=dtype, count=count, offset=start).astype(np.float64)
    else:
        tokens = buf[start:].split()
        if len(tokens) < count:
            raise FormatError(f"raster truncated: need {count} samples, have {len(tokens)}", offset=len(buf))
        try:
            values = np.array([int(t) for t in tokens[:count]], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"non-integer sample in ASCII raster: {exc}", offset=start) from None
    if values.max(initial=0) > maxval:
        raise FormatError(f"sample exceeds maxval {maxval}", offset=start)
    if maxval != 255:
        values = values * (255.0 / maxval)
    if nchan == 1:
        return values.reshape(height, width)
    return values.reshape(height, width, 3)


def _read_png(path) -> np.ndarray:
    from PIL import Image

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode.startswith("I"):
                # 16-bit grayscale
                return np.asarray(im, dtype=np.float64) * (255.0 / 65535.0)
            if mode in ("1", "L"):
                return np.asarray(im.convert("L"), dtype=np.float64)
            if mode in ("P", "RGB"):
                return np.asarray(im.convert("RGB"), dtype=np.float64)
            raise FormatError(f"unsupported PNG mode {mode!r}")
    except OSError as exc:
        raise FormatError(f"cannot decode PNG: {exc}") from None


def read_image(path) -> np.ndarray:
    """Read a PGM (P2/P5), PPM (P3/P6) or PNG file as a float image on [0, 255]."""
    with open(path, "rb") as fh:
        head = fh.read(8)
        fh.seek(0)
        if head.startswith(b"\x89PNG"):
            return _read_png(path)
        buf = fh.read()
    return _read_netpbm(buf)


# ---------------------------------------------------------------- writing


def _encode_netpbm(data: np.ndarray) -> bytes:
    h, w = data.shape[:2]
    magic = b"P6" if data.ndim == 3 else b"P5"
    return magic + f"\n{w} {h}\n255\n".encode("ascii") + data.tobytes()


def write_image(img, path) -> None:
    """Write ``img`` with the codec chosen by the file extension.

    ``.pgm`` takes gray images, ``.ppm`` color images, ``.png`` either.
    """
    color = is_color(img)
    arr = as_color(img) if color else as_gray(img)
    data = quantize(arr)
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".pgm" and color:
        raise ValueError("cannot write a color image as PGM; use .ppm or .png")
    if ext == ".ppm" and not color:
        raise ValueError("cannot write a gray image as PPM; use .pgm or .png")
    if ext in (".pgm", ".ppm", ".pnm"):
        with open(path, "wb") as fh:
            fh.write(_encode_netpbm(data))
    elif ext == ".png":
        from PIL import Image

        Image.fromarray(data).save(path, format="PNG")
    else:
        raise ValueError(f"unknown image extension {ext!r}; expected .pgm, .ppm, .pnm or .png")
