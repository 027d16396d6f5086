"""Deterministic placeholder payloads for the built-in mock adapters.

Each builder maps a stamp string (spec id + digest material) to a small,
stable blob with the right container format: repeated calls with the same
stamp produce byte-identical output, which is what makes run caching and
the determinism suite checkable without real model weights.
"""

from __future__ import annotations

import hashlib
import io
import struct
import wave

from PIL import Image, PngImagePlugin


def _digest(stamp: str) -> bytes:
    return hashlib.sha256(stamp.encode("utf-8")).digest()


def make_png(stamp: str, size: tuple[int, int] = (64, 48)) -> bytes:
    """A small patterned image with the stamp embedded as a text chunk."""
    seed = _digest(stamp)
    width, height = size
    image = Image.new("RGB", size)
    pixels = image.load()
    for y in range(height):
        for x in range(width):
            k = (x * 7 + y * 13) % len(seed)
            pixels[x, y] = (seed[k], seed[(k + 5) % len(seed)], seed[(k + 11) % len(seed)])
    info = PngImagePlugin.PngInfo()
    info.add_text("stamp", stamp)
    out = io.BytesIO()
    image.save(out, format="PNG", pnginfo=info)
    return out.getvalue()


def make_wav(stamp: str, seconds: float = 0.25, rate: int = 8000) -> bytes:
    """A short square-wave tone whose period is derived from the stamp."""
    seed = _digest(stamp)
    period = 20 + seed[0] % 60
    frames = bytearray()
    for i in range(int(seconds * rate)):
        value = 12000 if (i // period) % 2 == 0 else -12000
        frames += struct.pack("<h", value)
    out = io.BytesIO()
    with wave.open(out, "wb") as handle:
        handle.setnchannels(1)
        handle.setsampwidth(2)
        handle.setframerate(rate)
        handle.writeframes(bytes(frames))
    return out.getvalue()


def make_glb(stamp: str) -> bytes:
    """A minimal binary glTF container holding only a stamped JSON chunk."""
    payload = ('{"asset": {"version": "2.0"}, "extras": {"stamp": "%s"}}' % stamp).encode()
    padding = (4 - len(payload) % 4) % 4
    payload += b" " * padding
    chunk = struct.pack("<II", len(payload), 0x4E4F534A) + payload  # JSON chunk
    header = struct.pack("<III", 0x46546C67, 2, 12 + len(chunk))  # 'glTF', v2
    return header + chunk


def make_mp4(stamp: str) -> bytes:
    """An ISO-BMFF shell: an ftyp box plus the stamp in a free box."""
    ftyp = b"isom\x00\x00\x02\x00isommp41"
    boxes = struct.pack(">I", 8 + len(ftyp)) + b"ftyp" + ftyp
    stamp_bytes = stamp.encode("utf-8")
    boxes += struct.pack(">I", 8 + len(stamp_bytes)) + b"free" + stamp_bytes
    return boxes


BUILDERS = {
    "png": make_png,
    "jpg": make_png,
    "mp4": make_mp4,
    "glb": make_glb,
    "wav": make_wav,
    "svg": lambda stamp: (
        '<svg xmlns="http://www.w3.org/2000/svg"><desc>%s</desc></svg>' % stamp
    ).encode("utf-8"),
}


def make_blob(format: str, stamp: str) -> bytes:
    return BUILDERS[format](stamp)
