"""Video-track edit semantics: split, freeze, speed, mute, duplicate.

The timeline is an ordered list of segments; each segment maps a run of
output frames onto source frames.  A non-frozen segment carries a rational
``speed`` and a rational ``phase`` in [0, 1): output offset ``j`` inside the
segment reads source frame ``source_start + floor(phase + j * speed)``.
The phase is what makes :func:`split_at` exact for fractional speeds — the
right half of a split inherits the fractional part of the cut position, so
the concatenated mapping is bit-identical to the unsplit one.

All operations are pure: they return new Timeline values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator

MIN_SPEED = Fraction(1, 8)
MAX_SPEED = Fraction(8)


class TimelineError(ValueError):
    """Raised for out-of-range frames, bad segment indices, or bad speeds."""


@dataclass(frozen=True)
class Segment:
    source_start: int
    source_len: Fraction  # frozen: output duration in frames (integer-valued)
    speed: Fraction = Fraction(1)
    phase: Fraction = Fraction(0)
    frozen: bool = False
    muted: bool = False

    def output_len(self) -> int:
        if self.frozen:
            return int(self.source_len)
        return max(0, math.ceil((self.source_len - self.phase) / self.speed))

    def source_at(self, k: int) -> int:
        """Source frame for output offset k inside this segment."""
        if self.frozen:
            return self.source_start
        return self.source_start + math.floor(self.phase + k * self.speed)


@dataclass(frozen=True)
class SourceRef:
    source_frame: int
    muted: bool
    frozen: bool
    segment_index: int


@dataclass(frozen=True)
class Timeline:
    segments: tuple[Segment, ...]

    @staticmethod
    def identity(frame_count: int) -> "Timeline":
        if frame_count < 1:
            raise TimelineError("frame_count must be >= 1")
        return Timeline((Segment(0, Fraction(frame_count)),))

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)


def output_duration(tl: Timeline) -> int:
    return sum(seg.output_len() for seg in tl.segments)


def _locate(tl: Timeline, n: int) -> tuple[int, int]:
    """Segment index and local output offset for output frame n."""
    if n < 0:
        raise TimelineError(f"output frame {n} out of range")
    acc = 0
    for i, seg in enumerate(tl.segments):
        length = seg.output_len()
        if n < acc + length:
            return i, n - acc
        acc += length
    raise TimelineError(f"output frame {n} out of range (duration {acc})")


def map_output_frame(tl: Timeline, n: int) -> SourceRef:
    i, k = _locate(tl, n)
    seg = tl.segments[i]
    return SourceRef(seg.source_at(k), seg.muted, seg.frozen, i)


def split_at(tl: Timeline, n: int) -> Timeline:
    dur = output_duration(tl)
    if not 0 < n < dur:
        raise TimelineError(f"split point {n} must be strictly inside [0, {dur})")
    i, k = _locate(tl, n)
    if k == 0:
        return tl  # already a segment boundary
    seg = tl.segments[i]
    if seg.frozen:
        left = replace(seg, source_len=Fraction(k))
        right = replace(seg, source_len=seg.source_len - k)
    else:
        cut = seg.phase + k * seg.speed  # rational source offset of output k
        whole = math.floor(cut)
        left = replace(seg, source_len=cut)
        right = replace(
            seg,
            source_start=seg.source_start + whole,
            source_len=seg.source_len - whole,
            phase=cut - whole,
        )
    segs = tl.segments[:i] + (left, right) + tl.segments[i + 1 :]
    return Timeline(segs)


def insert_freeze(tl: Timeline, n: int, duration: int) -> Timeline:
    dur = output_duration(tl)
    if not 0 <= n <= dur:
        raise TimelineError(f"freeze point {n} out of range [0, {dur}]")
    if duration < 1:
        raise TimelineError("freeze duration must be >= 1")
    frame = map_output_frame(tl, n if n < dur else dur - 1).source_frame
    if 0 < n < dur:
        tl = split_at(tl, n)
    # after the split, n sits on a segment boundary (or at either end)
    acc = 0
    i = len(tl.segments)
    for idx, seg in enumerate(tl.segments):
        if acc == n:
            i = idx
            break
        acc += seg.output_len()
    frozen = Segment(frame, Fraction(duration), frozen=True)
    return Timeline(tl.segments[:i] + (frozen,) + tl.segments[i:])


def _check_index(tl: Timeline, i: int) -> None:
    if not 0 <= i < len(tl.segments):
        raise TimelineError(f"segment index {i} out of range")


def set_speed(tl: Timeline, segment_index: int, speed: Fraction) -> Timeline:
    _check_index(tl, segment_index)
    speed = Fraction(speed)
    if not MIN_SPEED <= speed <= MAX_SPEED:
        raise TimelineError(f"speed {speed} outside [{MIN_SPEED}, {MAX_SPEED}]")
    seg = tl.segments[segment_index]
    if seg.frozen:
        raise TimelineError("cannot change speed of a frozen segment")
    segs = list(tl.segments)
    segs[segment_index] = replace(seg, speed=speed)
    return Timeline(tuple(segs))


def set_muted(tl: Timeline, segment_index: int, muted: bool) -> Timeline:
    _check_index(tl, segment_index)
    segs = list(tl.segments)
    segs[segment_index] = replace(segs[segment_index], muted=muted)
    return Timeline(tuple(segs))


def duplicate_segment(tl: Timeline, segment_index: int) -> Timeline:
    _check_index(tl, segment_index)
    seg = tl.segments[segment_index]
    return Timeline(
        tl.segments[: segment_index + 1] + (seg,) + tl.segments[segment_index + 1 :]
    )


def muted_ranges(tl: Timeline) -> list[tuple[int, int]]:
    """Half-open output-frame ranges covered by muted segments, merged."""
    out: list[tuple[int, int]] = []
    acc = 0
    for seg in tl.segments:
        length = seg.output_len()
        if seg.muted and length > 0:
            if out and out[-1][1] == acc:
                out[-1] = (out[-1][0], acc + length)
            else:
                out.append((acc, acc + length))
        acc += length
    return out


def validate(tl: Timeline, frame_count: int) -> list[str]:
    problems: list[str] = []
    for i, seg in enumerate(tl.segments):
        where = f"timeline.segments[{i}]"
        if seg.source_start < 0:
            problems.append(f"{where}.source_start: must be >= 0")
        if seg.source_len <= 0:
            problems.append(f"{where}.source_len: must be > 0")
        if seg.frozen:
            if seg.source_len != int(seg.source_len):
                problems.append(f"{where}.source_len: frozen duration must be integral")
            if seg.source_start >= frame_count:
                problems.append(f"{where}.source_start: beyond source clip")
        else:
            if not MIN_SPEED <= seg.speed <= MAX_SPEED:
                problems.append(f"{where}.speed: outside [{MIN_SPEED}, {MAX_SPEED}]")
            if not 0 <= seg.phase < 1:
                problems.append(f"{where}.phase: must lie in [0, 1)")
            if seg.source_start + seg.source_len > frame_count:
                problems.append(f"{where}: source range exceeds clip length {frame_count}")
    if not problems and output_duration(tl) < 1:
        problems.append("timeline: output duration must be >= 1")
    return problems


def _frac_to_doc(f: Fraction) -> list[int]:
    return [f.numerator, f.denominator]


def _frac_from_doc(v, where: str) -> Fraction:
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v)):
        raise TimelineError(f"{where}: expected [numerator, denominator]")
    if v[1] <= 0:
        raise TimelineError(f"{where}: denominator must be > 0")
    return Fraction(v[0], v[1])


def to_doc(tl: Timeline) -> dict:
    return {
        "segments": [
            {
                "source_start": seg.source_start,
                "source_len": _frac_to_doc(seg.source_len),
                "speed": _frac_to_doc(seg.speed),
                "phase": _frac_to_doc(seg.phase),
                "frozen": seg.frozen,
                "muted": seg.muted,
            }
            for seg in tl.segments
        ]
    }


def from_doc(doc: dict) -> Timeline:
    if not isinstance(doc, dict) or "segments" not in doc:
        raise TimelineError("timeline: missing segments")
    segs = []
    for i, s in enumerate(doc["segments"]):
        where = f"timeline.segments[{i}]"
        try:
            segs.append(
                Segment(
                    source_start=int(s["source_start"]),
                    source_len=_frac_from_doc(s["source_len"], where + ".source_len"),
                    speed=_frac_from_doc(s.get("speed", [1, 1]), where + ".speed"),
                    phase=_frac_from_doc(s.get("phase", [0, 1]), where + ".phase"),
                    frozen=bool(s.get("frozen", False)),
                    muted=bool(s.get("muted", False)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, TimelineError):
                raise
            raise TimelineError(f"{where}: malformed segment ({exc})") from exc
    return Timeline(tuple(segs))
