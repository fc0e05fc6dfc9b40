"""Parsing of raw LM messages into thought text, code blocks, answers, and the terminate flag.

Every function here is total: any input string produces a result, never an
exception. Markers are case-sensitive (``ANSWER:``, ``FINAL ANSWER:``,
``TERMINATE``) and code fences are exactly three backticks; tilde fences are
not recognized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_FENCE = "```"
_TERMINATE_RE = re.compile(r"(?<![0-9A-Za-z_])TERMINATE(?![0-9A-Za-z_])")
_ANSWER_MARKER = "ANSWER:"
_FINAL_MARKER = "FINAL ANSWER:"


@dataclass(frozen=True)
class ParsedMessage:
    """The structured view of one raw LM reply."""

    thought: str
    code_blocks: tuple[str, ...] = field(default_factory=tuple)
    answer: str | None = None
    final_answer: str | None = None
    terminate: bool = False


def _fence_regions(text: str) -> list[tuple[int, int, str]]:
    """Locate well-formed fenced blocks.

    Returns (start_line_idx, end_line_idx, body) triples over the line list,
    where both indices point at fence lines. An opening fence with no closing
    fence contributes nothing.
    """
    lines = text.split("\n")
    regions: list[tuple[int, int, str]] = []
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if stripped.startswith(_FENCE):
            # Opening fence; an optional language tag may follow the backticks.
            j = i + 1
            while j < len(lines):
                if lines[j].strip() == _FENCE:
                    regions.append((i, j, "\n".join(lines[i + 1 : j])))
                    break
                j += 1
            else:
                break  # unterminated: drop this fence and everything after it
            i = j + 1
        else:
            i += 1
    return regions


def extract_code_blocks(text: str) -> list[str]:
    """Return the contents of every well-formed triple-backtick block, in order.

    The language tag on the opening fence (e.g. ``\\`\\`\\`python``) is not part
    of the content. An unterminated opening fence yields no block.
    """
    return [body for _, _, body in _fence_regions(text)]


def split_thought(text: str) -> str:
    """Return the message with fenced blocks removed.

    Whitespace is normalized at the seams where blocks were cut out: each
    surrounding prose segment is stripped and non-empty segments are joined
    with a single newline.
    """
    regions = _fence_regions(text)
    if not regions:
        return text
    lines = text.split("\n")
    keep: list[str] = []
    cursor = 0
    for start, end, _ in regions:
        keep.append("\n".join(lines[cursor:start]))
        cursor = end + 1
    keep.append("\n".join(lines[cursor:]))
    segments = [seg.strip() for seg in keep]
    return "\n".join(seg for seg in segments if seg)


def _capture_after(text: str, marker_end: int) -> str:
    """Capture answer text from ``marker_end`` to the end of that line,
    stopping early at a TERMINATE token."""
    tail = text[marker_end:]
    newline = tail.find("\n")
    if newline != -1:
        tail = tail[:newline]
    m = _TERMINATE_RE.search(tail)
    if m:
        tail = tail[: m.start()]
    return tail.strip()


def extract_answer(text: str) -> tuple[str | None, str | None]:
    """Extract ``ANSWER:`` and ``FINAL ANSWER:`` payloads from a message.

    Each payload is the text after the *last* occurrence of its marker, up to
    the end of that line or a TERMINATE token, trimmed. A ``FINAL ANSWER:``
    occurrence never doubles as an ``ANSWER:`` occurrence.
    """
    final_answer: str | None = None
    answer: str | None = None

    last_final = text.rfind(_FINAL_MARKER)
    if last_final != -1:
        final_answer = _capture_after(text, last_final + len(_FINAL_MARKER))

    # Scan plain ANSWER: markers, skipping those inside FINAL ANSWER:.
    pos = 0
    last_plain = -1
    while True:
        idx = text.find(_ANSWER_MARKER, pos)
        if idx == -1:
            break
        if not text[:idx].endswith("FINAL "):
            last_plain = idx
        pos = idx + len(_ANSWER_MARKER)
    if last_plain != -1:
        answer = _capture_after(text, last_plain + len(_ANSWER_MARKER))

    return answer, final_answer


def detect_terminate(text: str) -> bool:
    """True iff the standalone uppercase word TERMINATE appears in the message."""
    return _TERMINATE_RE.search(text) is not None


def parse_message(text: str) -> ParsedMessage:
    """Run the full parse pipeline over one raw LM message."""
    answer, final_answer = extract_answer(text)
    return ParsedMessage(
        thought=split_thought(text),
        code_blocks=tuple(extract_code_blocks(text)),
        answer=answer,
        final_answer=final_answer,
        terminate=detect_terminate(text),
    )
