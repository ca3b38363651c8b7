"""Deterministic synthetic scenes and the naive reference compositor.

The scene generator stands in for real footage plus an upstream tracker and
segmenter: entities are solid rectangles moving over a flat court, masks
mark exactly those rectangles, and the tracking dataset contains exactly the
drawn boxes.  Everything is a pure function of (spec, seed).

reference_render is the trusted oracle for the optimized compositor: the
same arithmetic contract written as the simplest possible per-pixel loops.
It is deliberately slow and must never be optimized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import geometry
from .compositor import (
    EllipseDraw,
    FramePlan,
    PolyFillDraw,
    RingDraw,
    SpotlightDraw,
    StrokeDraw,
    TextDraw,
    PILL_ALPHA8,
    PILL_COLOR,
)
from .font import text_bitmap
from .ingest import EntityTrack, Sample, TrackingDataset
from .model import Caption, FilterMode, VideoMeta

COURT_COLOR = (168, 124, 82)
LINE_COLOR = (230, 230, 230)


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class EntityScript:
    entity_id: str
    start: tuple[float, float]  # top-left at frame 0
    velocity: tuple[float, float]  # px per frame
    size: tuple[int, int]  # body w, h


@dataclass(frozen=True)
class SceneSpec:
    width: int = 64
    height: int = 36
    fps: Fraction = Fraction(30, 1)
    frame_count: int = 30
    sport: str = "basketball"
    entities: tuple[EntityScript, ...] = ()

    @staticmethod
    def from_doc(doc: dict) -> "SceneSpec":
        fps = doc.get("fps", [30, 1])
        return SceneSpec(
            width=int(doc["width"]),
            height=int(doc["height"]),
            fps=Fraction(int(fps[0]), int(fps[1])),
            frame_count=int(doc["frame_count"]),
            sport=str(doc.get("sport", "basketball")),
            entities=tuple(
                EntityScript(
                    entity_id=str(e["id"]),
                    start=(float(e["start"][0]), float(e["start"][1])),
                    velocity=(float(e["velocity"][0]), float(e["velocity"][1])),
                    size=(int(e["size"][0]), int(e["size"][1])),
                )
                for e in doc.get("entities", [])
            ),
        )


def _bbox_at(script: EntityScript, n: int) -> tuple[int, int, int, int]:
    x = int(math.floor(script.start[0] + script.velocity[0] * n + 0.5))
    y = int(math.floor(script.start[1] + script.velocity[1] * n + 0.5))
    return x, y, script.size[0], script.size[1]


class Scene:
    """Lazy, deterministic frame/mask access plus the matching dataset."""

    def __init__(self, spec: SceneSpec, seed: int = 0):
        self.spec = spec
        self.seed = seed
        rng = np.random.RandomState(seed)
        self.colors = {
            s.entity_id: tuple(int(v) for v in rng.randint(40, 220, size=3))
            for s in spec.entities
        }
        for script in spec.entities:
            for n in range(spec.frame_count):
                x, y, w, h = _bbox_at(script, n)
                if x < 0 or y < 0 or x + w > spec.width or y + h > spec.height:
                    raise SynthError(
                        f"entity {script.entity_id!r} leaves the frame at frame {n}"
                    )
        self.meta = VideoMeta(spec.width, spec.height, spec.fps, spec.frame_count)

    @property
    def frame_count(self) -> int:
        return self.spec.frame_count

    def frame(self, n: int) -> np.ndarray:
        if not 0 <= n < self.spec.frame_count:
            raise SynthError(f"frame {n} out of range")
        img = np.empty((self.spec.height, self.spec.width, 3), dtype=np.uint8)
        img[:, :] = COURT_COLOR
        cx = self.spec.width // 2 - 1
        img[:, cx : cx + 2] = LINE_COLOR
        for script in self.spec.entities:
            x, y, w, h = _bbox_at(script, n)
            img[y : y + h, x : x + w] = self.colors[script.entity_id]
        return img

    def mask(self, n: int) -> np.ndarray:
        if not 0 <= n < self.spec.frame_count:
            raise SynthError(f"mask {n} out of range")
        plane = np.zeros((self.spec.height, self.spec.width), dtype=np.uint8)
        for script in self.spec.entities:
            x, y, w, h = _bbox_at(script, n)
            plane[y : y + h, x : x + w] = 255
        return plane

    def dataset(self) -> TrackingDataset:
        tracks = []
        for script in self.spec.entities:
            track = EntityTrack(script.entity_id)
            for n in range(self.spec.frame_count):
                x, y, w, h = _bbox_at(script, n)
                track.samples[n] = Sample(n, (float(x), float(y), float(w), float(h)))
            tracks.append(track)
        return TrackingDataset(self.meta, self.spec.sport, tracks)


def generate_scene(spec: SceneSpec, seed: int = 0) -> Scene:
    return Scene(spec, seed)


def dataset_to_mot_csv(dataset: TrackingDataset) -> bytes:
    """MOT-style CSV (1-based frames) for parser-agreement tests and
    interchange; only numeric ids survive the trip."""
    lines = []
    for track in dataset.entities:
        for f in sorted(track.samples):
            s = track.samples[f]
            x, y, w, h = s.bbox
            lines.append(f"{f + 1},{track.entity_id},{x:g},{y:g},{w:g},{h:g},{s.conf:g}")
    lines.sort(key=lambda ln: (int(ln.split(",")[0]), int(ln.split(",")[1])))
    return ("\n".join(lines) + "\n" if lines else "").encode("ascii")


def stub_captioner(dataset: TrackingDataset, every_n_frames: int = 30) -> list[Caption]:
    """Deterministic rule-based caption stand-in: one caption per sampled
    frame, spans sized to the sampling interval."""
    if every_n_frames < 1:
        raise SynthError("every_n_frames must be >= 1")
    captions = []
    total = dataset.meta.frame_count
    for start in range(0, total, every_n_frames):
        end = min(start + every_n_frames, total)
        visible = [t for t in dataset.entities if start in t.samples]
        if visible:
            fastest = max(visible, key=lambda t: (_speed_at(t, start), t.entity_id))
            text = f"{len(visible)} players visible; fastest: {fastest.entity_id}"
        else:
            text = "0 players visible"
        captions.append(Caption(text, start, end))
    return captions


def _speed_at(track: EntityTrack, frame: int) -> float:
    nxt = track.samples.get(frame + 1) or track.samples.get(frame - 1)
    cur = track.samples.get(frame)
    if cur is None or nxt is None:
        return 0.0
    (x0, y0, w0, h0), (x1, y1, w1, h1) = cur.bbox, nxt.bbox
    return math.hypot((x1 + w1 / 2) - (x0 + w0 / 2), (y1 + h1 / 2) - (y0 + h0 / 2))


# ---------------------------------------------------------------------------
# naive reference compositor (the oracle; keep obvious, never optimize)


def _blend(c: int, s: int, a: int) -> int:
    return (((255 - a) * c + a * s) * 2 + 255) // 510


def _point_in_polygon(px: float, py: float, polygon) -> bool:
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xint:
                inside = not inside
    return inside


def _dist2_to_segment(px: float, py: float, seg) -> float:
    (x1, y1), (x2, y2) = seg
    dx, dy = x2 - x1, y2 - y1
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        ex = px - x1
        ey = py - y1
        return ex * ex + ey * ey
    t = ((px - x1) * dx + (py - y1) * dy) / l2
    t = min(max(t, 0.0), 1.0)
    ex = px - (x1 + t * dx)
    ey = py - (y1 + t * dy)
    return ex * ex + ey * ey


def _shape_bbox(shape, width: int, height: int):
    if isinstance(shape, EllipseDraw):
        xs = [p[0] for p in shape.polygon]
        ys = [p[1] for p in shape.polygon]
        m = shape.stroke_width / 2.0 + 1.0
    elif isinstance(shape, StrokeDraw):
        xs = [c for seg in shape.segments for c in (seg[0][0], seg[1][0])]
        ys = [c for seg in shape.segments for c in (seg[0][1], seg[1][1])]
        m = shape.width / 2.0 + 1.0
        if not xs:
            return None
    elif isinstance(shape, PolyFillDraw):
        xs = [p[0] for p in shape.polygon]
        ys = [p[1] for p in shape.polygon]
        m = 1.0
    elif isinstance(shape, RingDraw):
        xs = [shape.center[0] - shape.r_outer, shape.center[0] + shape.r_outer]
        ys = [shape.center[1] - shape.r_outer, shape.center[1] + shape.r_outer]
        m = 1.0
    else:
        return (0, 0, width, height)
    x0 = max(0, int(math.floor(min(xs) - m)))
    y0 = max(0, int(math.floor(min(ys) - m)))
    x1 = min(width, int(math.ceil(max(xs) + m)) + 1)
    y1 = min(height, int(math.ceil(max(ys) + m)) + 1)
    if x0 >= x1 or y0 >= y1:
        return None
    return x0, y0, x1, y1


def _ref_draw(c16, shape, width: int, height: int) -> None:
    if isinstance(shape, TextDraw):
        _ref_draw_text(c16, shape, width, height)
        return
    if isinstance(shape, SpotlightDraw):
        _ref_draw_spotlight(c16, shape, width, height)
        return
    box = _shape_bbox(shape, width, height)
    if box is None:
        return
    x0, y0, x1, y1 = box
    for y in range(y0, y1):
        for x in range(x0, x1):
            px, py = x + 0.5, y + 0.5
            if isinstance(shape, EllipseDraw):
                if shape.fill_alpha8 > 0 and _point_in_polygon(px, py, shape.polygon):
                    for ch in range(3):
                        c16[y, x, ch] = _blend(
                            int(c16[y, x, ch]),
                            shape.stroke_color[ch] * 257,
                            shape.fill_alpha8,
                        )
                n = len(shape.polygon)
                r2 = (shape.stroke_width / 2.0) ** 2
                on_edge = False
                for i in range(n):
                    seg = (shape.polygon[i], shape.polygon[(i + 1) % n])
                    if _dist2_to_segment(px, py, seg) <= r2:
                        on_edge = True
                        break
                if on_edge and shape.stroke_color[3] > 0:
                    for ch in range(3):
                        c16[y, x, ch] = _blend(
                            int(c16[y, x, ch]),
                            shape.stroke_color[ch] * 257,
                            shape.stroke_color[3],
                        )
            elif isinstance(shape, StrokeDraw):
                r2 = (shape.width / 2.0) ** 2
                hit = False
                for seg in shape.segments:
                    if _dist2_to_segment(px, py, seg) <= r2:
                        hit = True
                        break
                if hit and shape.color[3] > 0:
                    for ch in range(3):
                        c16[y, x, ch] = _blend(
                            int(c16[y, x, ch]), shape.color[ch] * 257, shape.color[3]
                        )
            elif isinstance(shape, PolyFillDraw):
                if shape.alpha8 > 0 and _point_in_polygon(px, py, shape.polygon):
                    for ch in range(3):
                        c16[y, x, ch] = _blend(
                            int(c16[y, x, ch]), shape.color[ch] * 257, shape.alpha8
                        )
            elif isinstance(shape, RingDraw):
                cx, cy = shape.center
                d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy)
                inside = d2 <= shape.r_outer * shape.r_outer and d2 >= (
                    shape.r_inner * shape.r_inner
                )
                if inside and shape.color[3] > 0:
                    for ch in range(3):
                        c16[y, x, ch] = _blend(
                            int(c16[y, x, ch]), shape.color[ch] * 257, shape.color[3]
                        )


def _ref_draw_spotlight(c16, shape: SpotlightDraw, width: int, height: int) -> None:
    inv = [list(shape.inv_h[0:3]), list(shape.inv_h[3:6]), list(shape.inv_h[6:9])]
    cx, cy = shape.center
    for y in range(height):
        for x in range(width):
            px, py = x + 0.5, y + 0.5
            denom = inv[2][0] * px + inv[2][1] * py + inv[2][2]
            if abs(denom) < geometry.DEGENERATE_EPS:
                continue
            qx = (inv[0][0] * px + inv[0][1] * py + inv[0][2]) / denom
            qy = (inv[1][0] * px + inv[1][1] * py + inv[1][2]) / denom
            rr = math.sqrt((qx - cx) * (qx - cx) + (qy - cy) * (qy - cy)) / shape.radius
            if rr > 1.0:
                continue
            grad = shape.inner_alpha + (shape.outer_alpha - shape.inner_alpha) * rr
            a8 = int(math.floor(grad * shape.color_alpha + 0.5))
            if a8 <= 0:
                continue
            for ch in range(3):
                c16[y, x, ch] = _blend(int(c16[y, x, ch]), shape.color[ch] * 257, a8)


def _ref_draw_text(c16, shape: TextDraw, width: int, height: int) -> None:
    bitmap = text_bitmap(shape.content, shape.scale)
    bh, bw = bitmap.shape
    ox, oy = shape.origin
    if shape.pill and bw > 0:
        pad = 4.0 * shape.scale
        px0, py0 = ox - pad, oy - pad
        px1, py1 = ox + bw + pad, oy + bh + pad
        ccx = (px0 + px1) / 2.0
        ccy = (py0 + py1) / 2.0
        hw = (px1 - px0) / 2.0 - pad
        hh = (py1 - py0) / 2.0 - pad
        for y in range(max(0, int(math.floor(py0))), min(height, int(math.ceil(py1)) + 1)):
            for x in range(max(0, int(math.floor(px0))), min(width, int(math.ceil(px1)) + 1)):
                px, py = x + 0.5, y + 0.5
                dx = max(abs(px - ccx) - hw, 0.0)
                dy = max(abs(py - ccy) - hh, 0.0)
                if dx * dx + dy * dy <= pad * pad:
                    for ch in range(3):
                        c16[y, x, ch] = _blend(
                            int(c16[y, x, ch]), PILL_COLOR[ch] * 257, PILL_ALPHA8
                        )
    for by in range(bh):
        for bx in range(bw):
            if not bitmap[by, bx]:
                continue
            x, y = ox + bx, oy + by
            if not (0 <= x < width and 0 <= y < height):
                continue
            for ch in range(3):
                c16[y, x, ch] = _blend(
                    int(c16[y, x, ch]), shape.color[ch] * 257, shape.color[3]
                )


def reference_render(plan: FramePlan, bg: np.ndarray, mask: np.ndarray) -> np.ndarray:
    h, w = plan.height, plan.width
    if bg.shape != (h, w, 3):
        raise SynthError(f"background is {bg.shape}, expected {(h, w, 3)}")
    if mask.shape != (h, w):
        raise SynthError(f"mask is {mask.shape}, expected {(h, w)}")

    c16 = np.zeros((h, w, 3), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            for ch in range(3):
                c16[y, x, ch] = int(bg[y, x, ch]) * 257

    if plan.bg_filter is not None and plan.bg_filter.alpha8 > 0:
        a8 = plan.bg_filter.alpha8
        for y in range(h):
            for x in range(w):
                r, g, b = (int(c16[y, x, ch]) for ch in range(3))
                if plan.bg_filter.mode is FilterMode.GRAYSCALE:
                    luma = int(math.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5))
                    src = (luma, luma, luma)
                else:
                    src = tuple(v * 257 for v in plan.bg_filter.color)
                for ch, c in enumerate((r, g, b)):
                    c16[y, x, ch] = _blend(c, src[ch], a8)

    for cmd in plan.draws:
        if cmd.layer < 20:
            _ref_draw(c16, cmd.shape, w, h)

    for y in range(h):
        for x in range(w):
            m = int(mask[y, x])
            if m == 0:
                continue
            for ch in range(3):
                c16[y, x, ch] = _blend(int(c16[y, x, ch]), int(bg[y, x, ch]) * 257, m)

    for cmd in plan.draws:
        if cmd.layer >= 20:
            _ref_draw(c16, cmd.shape, w, h)

    if plan.zoom is not None and plan.zoom.factor > 1.0:
        f = plan.zoom.factor
        win_w, win_h = w / f, h / f
        x0 = min(max(0.0, plan.zoom.center[0] - win_w / 2.0), w - win_w)
        y0 = min(max(0.0, plan.zoom.center[1] - win_h / 2.0), h - win_h)
        sxs, sys = win_w / w, win_h / h
        out = np.zeros_like(c16)
        for y in range(h):
            sy = y0 + (y + 0.5) * sys - 0.5
            iy = int(math.floor(sy))
            fy = sy - iy
            ylo = min(max(iy, 0), h - 1)
            yhi = min(max(iy + 1, 0), h - 1)
            for x in range(w):
                sx = x0 + (x + 0.5) * sxs - 0.5
                ix = int(math.floor(sx))
                fx = sx - ix
                xlo = min(max(ix, 0), w - 1)
                xhi = min(max(ix + 1, 0), w - 1)
                for ch in range(3):
                    v00 = float(c16[ylo, xlo, ch])
                    v01 = float(c16[ylo, xhi, ch])
                    v10 = float(c16[yhi, xlo, ch])
                    v11 = float(c16[yhi, xhi, ch])
                    val = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * (
                        (1.0 - fx) * v10 + fx * v11
                    )
                    out[y, x, ch] = int(math.floor(val + 0.5))
        c16 = out

    for cap in plan.captions:
        _ref_draw_text(c16, cap, w, h)

    out8 = np.zeros((h, w, 3), dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            for ch in range(3):
                out8[y, x, ch] = (int(c16[y, x, ch]) * 2 + 257) // 514
    return out8
