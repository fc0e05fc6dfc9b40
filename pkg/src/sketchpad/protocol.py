"""Length-prefixed JSON frame codec for the engine<->kernel wire protocol.

A frame is a 4-byte big-endian unsigned length followed by a canonical JSON
body (sorted keys, compact separators, UTF-8). Message types:

- ``hello``    {"type": "hello", "version": 1}
- ``execute``  {"type": "execute", "id": int, "code": str, "timeout_ms": int}
- ``result``   {"type": "result", "id": int, "status": str, "stdout": str,
                "stderr": str, "images": [{"format": str, "data_b64": str}],
                "error_trace": str|null}
- ``shutdown`` {"type": "shutdown"}

Receivers ignore unknown fields; an unknown ``type`` poisons the session.
Image bytes ride base64-encoded inside the body.
"""

from __future__ import annotations

import json
import struct
from typing import Any, BinaryIO

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 256 * 1024 * 1024
_LEN = struct.Struct(">I")


class FrameError(Exception):
    """Base class for framing failures."""


class NeedMoreBytes(FrameError):
    """The buffer ends mid-frame; ``needed`` more bytes would complete it."""

    def __init__(self, needed: int):
        super().__init__(f"incomplete frame: need {needed} more bytes")
        self.needed = needed


class FrameCorrupt(FrameError):
    """The bytes cannot be a frame, no matter what follows."""


class FrameTooLarge(FrameError):
    """Declared or actual body length exceeds MAX_FRAME_BYTES."""


def encode_frame(payload: dict[str, Any]) -> bytes:
    """Serialize a payload into one wire frame."""
    if not isinstance(payload, dict):
        raise FrameCorrupt(f"payload must be a JSON object, got {type(payload).__name__}")
    try:
        body = json.dumps(
            payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False
        ).encode("utf-8")
    except (TypeError, ValueError) as exc:
        raise FrameCorrupt(f"payload not JSON-serializable: {exc}") from exc
    if len(body) > MAX_FRAME_BYTES:
        raise FrameTooLarge(f"frame body is {len(body)} bytes, limit {MAX_FRAME_BYTES}")
    return _LEN.pack(len(body)) + body


def decode_frame(data: bytes) -> dict[str, Any]:
    """Decode exactly one frame.

    Raises NeedMoreBytes when the buffer is a proper prefix of a frame,
    FrameCorrupt when it can never become one, FrameTooLarge for oversize
    declarations.
    """
    payload, rest = split_frame(data)
    if rest:
        raise FrameCorrupt(f"{len(rest)} trailing bytes after frame")
    return payload


def split_frame(data: bytes) -> tuple[dict[str, Any], bytes]:
    """Decode the first frame in ``data`` and return (payload, remainder)."""
    if len(data) < _LEN.size:
        raise NeedMoreBytes(_LEN.size - len(data))
    (length,) = _LEN.unpack_from(data)
    if length == 0:
        raise FrameCorrupt("frame declares an empty body")
    if length > MAX_FRAME_BYTES:
        raise FrameTooLarge(f"frame declares {length} bytes, limit {MAX_FRAME_BYTES}")
    end = _LEN.size + length
    if len(data) < end:
        raise NeedMoreBytes(end - len(data))
    body = data[_LEN.size : end]
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FrameCorrupt(f"frame body is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise FrameCorrupt("frame body is not a JSON object")
    return payload, data[end:]


def write_frame(stream: BinaryIO, payload: dict[str, Any]) -> None:
    stream.write(encode_frame(payload))
    stream.flush()


def read_frame(stream: BinaryIO) -> dict[str, Any] | None:
    """Read one frame from a blocking stream; None on clean EOF at a boundary."""
    header = stream.read(_LEN.size)
    if not header:
        return None
    while len(header) < _LEN.size:
        chunk = stream.read(_LEN.size - len(header))
        if not chunk:
            raise FrameCorrupt("stream ended inside a frame header")
        header += chunk
    (length,) = _LEN.unpack(header)
    if length == 0:
        raise FrameCorrupt("frame declares an empty body")
    if length > MAX_FRAME_BYTES:
        raise FrameTooLarge(f"frame declares {length} bytes, limit {MAX_FRAME_BYTES}")
    body = b""
    while len(body) < length:
        chunk = stream.read(length - len(body))
        if not chunk:
            raise FrameCorrupt("stream ended inside a frame body")
        body += chunk
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FrameCorrupt(f"frame body is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise FrameCorrupt("frame body is not a JSON object")
    return payload


def hello_frame(version: int = PROTOCOL_VERSION) -> dict[str, Any]:
    return {"type": "hello", "version": version}


def execute_frame(request_id: int, code: str, timeout_ms: int) -> dict[str, Any]:
    return {"type": "execute", "id": request_id, "code": code, "timeout_ms": timeout_ms}


def result_frame(
    request_id: int,
    status: str,
    stdout: str = "",
    stderr: str = "",
    images: list[dict[str, str]] | None = None,
    error_trace: str | None = None,
) -> dict[str, Any]:
    frame: dict[str, Any] = {
        "type": "result",
        "id": request_id,
        "status": status,
        "stdout": stdout,
        "stderr": stderr,
        "images": images or [],
    }
    if error_trace is not None:
        frame["error_trace"] = error_trace
    return frame


def shutdown_frame() -> dict[str, Any]:
    return {"type": "shutdown"}
