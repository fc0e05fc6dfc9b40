"""Multimodal content parts: the text/image atoms of queries and observations."""

from __future__ import annotations

import io
from dataclasses import dataclass

from PIL import Image


@dataclass(frozen=True)
class Part:
    """One text or image piece of a multimodal message.

    Exactly one payload is populated, matching ``kind``.
    """

    kind: str  # "text" | "image"
    text: str | None = None
    image: bytes | None = None
    image_format: str | None = None

    def __post_init__(self):
        if self.kind == "text":
            if self.text is None or self.image is not None:
                raise ValueError("text part must carry text and no image payload")
        elif self.kind == "image":
            if self.image is None or self.text is not None:
                raise ValueError("image part must carry image bytes and no text payload")
            if not self.image_format:
                raise ValueError("image part requires a format tag")
        else:
            raise ValueError(f"unknown part kind: {self.kind!r}")


def text_part(text: str) -> Part:
    return Part(kind="text", text=text)


def image_part(data: bytes, fmt: str = "png") -> Part:
    return Part(kind="image", image=data, image_format=fmt.lower())


@dataclass(frozen=True)
class Query:
    """The initial multimodal request that opens an episode."""

    parts: tuple[Part, ...]
    task_id: str

    def __post_init__(self):
        if not self.parts:
            raise ValueError("query must have at least one part")
        for part in self.parts:
            if part.kind == "image":
                decode_image(part.image)


def decode_image(data: bytes) -> Image.Image:
    """Decode image bytes, raising ValueError if they are not a valid image."""
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
        return img
    except Exception as exc:
        raise ValueError(f"undecodable image bytes: {exc}") from exc


def downscale_png(data: bytes, max_edge: int) -> bytes:
    """Cap an image's longest edge at ``max_edge`` pixels, preserving aspect.

    Returns the input bytes unchanged when no resize is needed, so images
    that already fit pass through byte-identically. Resized output is PNG.
    """
    img = decode_image(data)
    w, h = img.size
    if max(w, h) <= max_edge:
        return data
    scale = max_edge / max(w, h)
    new_size = (max(1, round(w * scale)), max(1, round(h * scale)))
    resized = img.convert("RGB").resize(new_size, Image.BILINEAR)
    out = io.BytesIO()
    resized.save(out, format="PNG")
    return out.getvalue()
