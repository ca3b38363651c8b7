"""Loading of tracking data, video frames and foreground mattes.

Tracking comes in two formats: the canonical JSON file and MOT-style CSV.
Video and masks are numbered PNG frames or uncompressed YUV4MPEG2 streams;
compressed containers are decoded externally so renders stay bit-exact.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np
from PIL import Image

from .model import Point, VideoMeta

SPORTS = ("basketball", "soccer", "volleyball", "lacrosse", "tennis")
DEFAULT_MAX_GAP = 12  # ~0.4 s at 30 fps; bridges brief occlusions

# COCO 17-keypoint order
KP_LEFT_EYE, KP_RIGHT_EYE = 1, 2
KP_LEFT_HIP, KP_RIGHT_HIP = 11, 12
KP_LEFT_ANKLE, KP_RIGHT_ANKLE = 15, 16

Keypoints = tuple[Optional[Point], ...]  # length 17, COCO order


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    frame: int
    bbox: tuple[float, float, float, float]  # x, y, w, h in source px
    conf: float = 1.0
    keypoints: Optional[Keypoints] = None
    interpolated: bool = False


@dataclass
class EntityTrack:
    entity_id: str
    samples: dict[int, Sample] = field(default_factory=dict)


@dataclass
class TrackingDataset:
    meta: VideoMeta
    sport: str
    entities: list[EntityTrack]

    def entity(self, entity_id: str) -> EntityTrack:
        for track in self.entities:
            if track.entity_id == entity_id:
                return track
        raise IngestError(f"unknown entity {entity_id!r}")

    def has_entity(self, entity_id: str) -> bool:
        return any(t.entity_id == entity_id for t in self.entities)


def _check_bbox(bbox, frame: int, frame_count: int, where: str) -> None:
    x, y, w, h = bbox
    if w <= 0 or h <= 0:
        raise IngestError(f"{where}: bbox width/height must be > 0")
    if not 0 <= frame < frame_count:
        raise IngestError(f"{where}: frame {frame} outside [0, {frame_count})")


def _keypoints_from_doc(v, where: str) -> Keypoints:
    if not (isinstance(v, list) and len(v) == 17):
        raise IngestError(f"{where}: keypoints must be 17 entries in COCO order")
    out: list[Optional[Point]] = []
    for p in v:
        if p is None:
            out.append(None)
        else:
            out.append((float(p[0]), float(p[1])))
    return tuple(out)


def parse_tracking_canonical(data: bytes) -> TrackingDataset:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IngestError(f"malformed tracking file: {exc}") from exc
    try:
        m = doc["meta"]
        meta = VideoMeta(
            width=int(m["width"]),
            height=int(m["height"]),
            fps=Fraction(int(m["fps"][0]), int(m["fps"][1])),
            frame_count=int(m["frame_count"]),
        )
        sport = str(doc["sport"])
        raw_entities = doc["entities"]
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise IngestError(f"malformed tracking header: {exc}") from exc
    if sport not in SPORTS:
        raise IngestError(f"sport: unknown sport {sport!r}")

    entities: list[EntityTrack] = []
    seen_ids: set[str] = set()
    for ei, ed in enumerate(raw_entities):
        where = f"entities[{ei}]"
        try:
            eid = str(ed["id"])
            raw_samples = ed["samples"]
        except (KeyError, TypeError) as exc:
            raise IngestError(f"{where}: malformed entity record ({exc})") from exc
        if eid in seen_ids:
            raise IngestError(f"{where}: duplicate entity id {eid!r}")
        seen_ids.add(eid)
        track = EntityTrack(eid)
        for si, sd in enumerate(raw_samples):
            swhere = f"{where}.samples[{si}]"
            try:
                frame = int(sd["frame"])
                bbox = tuple(float(v) for v in sd["bbox"])
                conf = float(sd.get("conf", 1.0))
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise IngestError(f"{swhere}: malformed sample ({exc})") from exc
            if len(bbox) != 4:
                raise IngestError(f"{swhere}: bbox must be [x, y, w, h]")
            _check_bbox(bbox, frame, meta.frame_count, swhere)
            if frame in track.samples:
                raise IngestError(f"{swhere}: duplicate frame {frame} for entity {eid!r}")
            kp = None
            if sd.get("keypoints") is not None:
                kp = _keypoints_from_doc(sd["keypoints"], swhere)
            track.samples[frame] = Sample(frame, bbox, conf, kp)
        entities.append(track)
    return TrackingDataset(meta, sport, entities)


def dataset_to_canonical(dataset: TrackingDataset) -> bytes:
    doc = {
        "meta": {
            "width": dataset.meta.width,
            "height": dataset.meta.height,
            "fps": [dataset.meta.fps.numerator, dataset.meta.fps.denominator],
            "frame_count": dataset.meta.frame_count,
        },
        "sport": dataset.sport,
        "entities": [
            {
                "id": t.entity_id,
                "samples": [
                    {
                        "frame": s.frame,
                        "bbox": list(s.bbox),
                        "conf": s.conf,
                        **(
                            {"keypoints": [list(p) if p else None for p in s.keypoints]}
                            if s.keypoints is not None
                            else {}
                        ),
                    }
                    for s in (t.samples[f] for f in sorted(t.samples))
                ],
            }
            for t in dataset.entities
        ],
    }
    return json.dumps(doc, ensure_ascii=False).encode("utf-8")


def parse_tracking_mot_csv(data: bytes, meta: VideoMeta) -> TrackingDataset:
    """MOT-style rows `frame,id,x,y,w,h,conf` with 1-based frame numbers."""
    tracks: dict[str, EntityTrack] = {}
    for lineno, line in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) < 7:
            raise IngestError(f"line {lineno}: expected frame,id,x,y,w,h,conf")
        try:
            frame1 = int(parts[0])
            eid = str(int(parts[1]))
            x, y, w, h = (float(v) for v in parts[2:6])
            conf = float(parts[6])
        except ValueError as exc:
            raise IngestError(f"line {lineno}: non-numeric field ({exc})") from exc
        if frame1 < 1:
            raise IngestError(f"line {lineno}: MOT frames are 1-based, got {frame1}")
        frame = frame1 - 1
        _check_bbox((x, y, w, h), frame, meta.frame_count, f"line {lineno}")
        track = tracks.setdefault(eid, EntityTrack(eid))
        if frame in track.samples:
            raise IngestError(f"line {lineno}: duplicate frame {frame1} for id {eid}")
        track.samples[frame] = Sample(frame, (x, y, w, h), conf)
    entities = [tracks[k] for k in sorted(tracks, key=lambda s: (len(s), s))]
    return TrackingDataset(meta, "basketball", entities)


def interpolate_gaps(track: EntityTrack, max_gap: int = DEFAULT_MAX_GAP) -> EntityTrack:
    """Fill missing runs of length <= max_gap by per-component linear
    interpolation.  Original samples are never altered; filled samples are
    flagged interpolated.  Idempotent."""
    if max_gap < 0:
        raise IngestError("max_gap must be >= 0")
    frames = sorted(f for f, s in track.samples.items() if not s.interpolated)
    out = dict(track.samples)
    for f0, f1 in zip(frames, frames[1:]):
        gap = f1 - f0 - 1
        if gap == 0 or gap > max_gap:
            continue
        a, b = track.samples[f0], track.samples[f1]
        both_kp = a.keypoints is not None and b.keypoints is not None
        for f in range(f0 + 1, f1):
            t = (f - f0) / (f1 - f0)
            bbox = tuple(a.bbox[i] + (b.bbox[i] - a.bbox[i]) * t for i in range(4))
            kp = None
            if both_kp:
                kp = tuple(
                    (
                        (pa[0] + (pb[0] - pa[0]) * t, pa[1] + (pb[1] - pa[1]) * t)
                        if pa is not None and pb is not None
                        else None
                    )
                    for pa, pb in zip(a.keypoints, b.keypoints)
                )
            out[f] = Sample(
                frame=f,
                bbox=bbox,
                conf=a.conf + (b.conf - a.conf) * t,
                keypoints=kp,
                interpolated=True,
            )
    return EntityTrack(track.entity_id, out)


def _midpoint(a: Point, b: Point) -> Point:
    return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


def resolve_anchor(
    dataset: TrackingDataset,
    entity_id: str,
    source_frame: int,
    placement,
) -> Optional[Point]:
    """Scene point for an entity at a placement, or None when the entity has
    no sample at that frame.  Uses pose keypoints when available, else the
    bounding box."""
    from .model import Placement

    track = dataset.entity(entity_id)  # raises for unknown ids
    sample = track.samples.get(source_frame)
    if sample is None:
        return None
    x, y, w, h = sample.bbox
    placement = Placement(placement)
    kp = sample.keypoints
    if kp is not None:
        if placement is Placement.HEAD and kp[KP_LEFT_EYE] and kp[KP_RIGHT_EYE]:
            mx, my = _midpoint(kp[KP_LEFT_EYE], kp[KP_RIGHT_EYE])
            return (mx, my - 0.15 * h)
        if placement is Placement.WAIST and kp[KP_LEFT_HIP] and kp[KP_RIGHT_HIP]:
            return _midpoint(kp[KP_LEFT_HIP], kp[KP_RIGHT_HIP])
        if placement is Placement.GROUND and kp[KP_LEFT_ANKLE] and kp[KP_RIGHT_ANKLE]:
            return _midpoint(kp[KP_LEFT_ANKLE], kp[KP_RIGHT_ANKLE])
    if placement is Placement.HEAD:
        return (x + w / 2.0, y)
    if placement is Placement.WAIST:
        return (x + w / 2.0, y + h / 2.0)
    return (x + w / 2.0, y + h)


def bbox_at(dataset: TrackingDataset, entity_id: str, source_frame: int):
    sample = dataset.entity(entity_id).samples.get(source_frame)
    return None if sample is None else sample.bbox


def interpolate_dataset(
    dataset: TrackingDataset, max_gap: int = DEFAULT_MAX_GAP
) -> TrackingDataset:
    return replace(
        dataset, entities=[interpolate_gaps(t, max_gap) for t in dataset.entities]
    )


# ---------------------------------------------------------------------------
# frame sources


class FrameSource:
    """Random access to decoded frames; safe for concurrent reads at
    distinct indices (each read opens its own handle)."""

    frame_count: int
    width: int
    height: int

    def get_frame(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def _check_range(self, n: int) -> None:
        if not 0 <= n < self.frame_count:
            raise IngestError(f"frame {n} outside [0, {self.frame_count})")


class ImageDirSource(FrameSource):
    """Directory of frame_%06d.png (RGB) or mask_%06d.png (grayscale)."""

    def __init__(self, directory: str, pattern: str, expect_gray: bool = False):
        self.directory = directory
        self.pattern = pattern
        self.expect_gray = expect_gray
        numbered = re.compile(
            re.escape(pattern).replace(re.escape("%06d"), r"(\d{6})")
        )
        files = sorted(
            f for f in os.listdir(directory) if numbered.fullmatch(f)
        )
        if not files:
            raise IngestError(f"no frames matching {pattern!r} in {directory}")
        self.frame_count = len(files)
        for i, f in enumerate(files):
            if f != pattern % i:
                raise IngestError(f"frame files not contiguous: missing {pattern % i}")
        first = self.get_frame_unchecked(0)
        self.height, self.width = first.shape[:2]

    def _path(self, n: int) -> str:
        return os.path.join(self.directory, self.pattern % n)

    def get_frame_unchecked(self, n: int) -> np.ndarray:
        path = self._path(n)
        if not os.path.exists(path):
            raise IngestError(f"missing frame file {path}")
        with Image.open(path) as img:
            img = img.convert("L" if self.expect_gray else "RGB")
            return np.asarray(img, dtype=np.uint8)

    def get_frame(self, n: int) -> np.ndarray:
        self._check_range(n)
        arr = self.get_frame_unchecked(n)
        if arr.shape[:2] != (self.height, self.width):
            raise IngestError(
                f"frame {n}: dimensions {arr.shape[1]}x{arr.shape[0]} do not match "
                f"{self.width}x{self.height}"
            )
        return arr


class Y4MSource(FrameSource):
    """Uncompressed YUV4MPEG2 stream; C420jpeg (decoded to RGB via full-range
    BT.601) or Cmono (single plane)."""

    def __init__(self, path: str):
        self.path = path
        with open(path, "rb") as f:
            header = f.readline()
            self._data_start = f.tell()
        if not header.startswith(b"YUV4MPEG2"):
            raise IngestError(f"{path}: not a YUV4MPEG2 stream")
        self.colorspace = "420jpeg"
        width = height = None
        self.fps = Fraction(30, 1)
        for token in header.decode("ascii").strip().split()[1:]:
            tag, rest = token[0], token[1:]
            if tag == "W":
                width = int(rest)
            elif tag == "H":
                height = int(rest)
            elif tag == "F":
                num, den = rest.split(":")
                self.fps = Fraction(int(num), int(den))
            elif tag == "C":
                self.colorspace = rest
        if width is None or height is None:
            raise IngestError(f"{path}: header missing W/H")
        self.width, self.height = width, height
        if self.colorspace.startswith("420"):
            self._frame_bytes = width * height * 3 // 2
        elif self.colorspace == "mono":
            self._frame_bytes = width * height
        else:
            raise IngestError(f"{path}: unsupported colorspace C{self.colorspace}")
        total = os.path.getsize(path) - self._data_start
        per = self._frame_bytes + len(b"FRAME\n")
        if total % per:
            raise IngestError(f"{path}: truncated stream")
        self.frame_count = total // per

    def _read_raw(self, n: int) -> bytes:
        per = self._frame_bytes + 6
        with open(self.path, "rb") as f:
            f.seek(self._data_start + n * per)
            marker = f.read(6)
            if marker != b"FRAME\n":
                raise IngestError(f"{self.path}: bad frame marker at frame {n}")
            return f.read(self._frame_bytes)

    def get_frame(self, n: int) -> np.ndarray:
        self._check_range(n)
        raw = self._read_raw(n)
        w, h = self.width, self.height
        if self.colorspace == "mono":
            return np.frombuffer(raw, dtype=np.uint8).reshape(h, w)
        y = np.frombuffer(raw[: w * h], dtype=np.uint8).reshape(h, w).astype(np.float64)
        cw, ch = w // 2, h // 2
        cb = np.frombuffer(raw[w * h : w * h + cw * ch], dtype=np.uint8).reshape(ch, cw)
        cr = np.frombuffer(raw[w * h + cw * ch :], dtype=np.uint8).reshape(ch, cw)
        cb = np.repeat(np.repeat(cb, 2, axis=0), 2, axis=1).astype(np.float64) - 128.0
        cr = np.repeat(np.repeat(cr, 2, axis=0), 2, axis=1).astype(np.float64) - 128.0
        r = y + 1.402 * cr
        g = y - 0.344136 * cb - 0.714136 * cr
        b = y + 1.772 * cb
        rgb = np.stack([r, g, b], axis=-1)
        return np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)


def open_video(path: str) -> FrameSource:
    if os.path.isdir(path):
        return ImageDirSource(path, "frame_%06d.png")
    if path.endswith(".y4m"):
        return Y4MSource(path)
    raise IngestError(f"unsupported video source {path!r} (PNG dir or .y4m)")


def open_masks(path: str) -> FrameSource:
    if os.path.isdir(path):
        return ImageDirSource(path, "mask_%06d.png", expect_gray=True)
    if path.endswith(".y4m"):
        src = Y4MSource(path)
        if src.colorspace != "mono":
            raise IngestError(f"{path}: mask y4m must be Cmono")
        return src
    raise IngestError(f"unsupported mask source {path!r} (PNG dir or .y4m)")


def load_video_frame(source: FrameSource, n: int) -> np.ndarray:
    frame = source.get_frame(n)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise IngestError(f"frame {n}: expected an RGB frame")
    return frame


def load_mask_frame(masks: FrameSource, n: int) -> np.ndarray:
    plane = masks.get_frame(n)
    if plane.ndim != 2:
        raise IngestError(f"mask {n}: expected a single-channel plane")
    return plane


@dataclass
class AssetStore:
    """Resolves a project's asset refs under a data root directory."""

    root: str

    def _resolve(self, ref: str) -> str:
        path = os.path.normpath(os.path.join(self.root, ref))
        if not path.startswith(os.path.normpath(self.root)):
            raise IngestError(f"asset ref {ref!r} escapes the data root")
        if not os.path.exists(path):
            raise IngestError(f"asset {ref!r} not found under {self.root}")
        return path

    def video(self, ref: str) -> FrameSource:
        return open_video(self._resolve(ref))

    def masks(self, ref: str) -> FrameSource:
        return open_masks(self._resolve(ref))

    def tracking(self, ref: str) -> TrackingDataset:
        path = self._resolve(ref)
        with open(path, "rb") as f:
            data = f.read()
        if ref.endswith(".csv"):
            raise IngestError("MOT CSV tracking needs meta; convert via the CLI first")
        return parse_tracking_canonical(data)
