"""Per-frame planning and rasterization.

plan_frame resolves an output frame into a FramePlan: the mapped source
frame, an ordered draw list with all geometry/colors resolved (so rendering
needs no tracking data), canvas-state modifiers (background filter, zoom)
and the captions active that frame.

render_frame executes the plan deterministically:
  background -> background filter -> ground effects (layer 10) ->
  foreground matte -> overlays (layer 30) -> zoom -> captions.

Objects whose anchor has no tracking sample at the mapped source frame are
dropped from the plan; tracking gaps are routine and must not kill a render.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry, raster
from .font import CELL_H, CELL_W, text_box
from .ingest import TrackingDataset, resolve_anchor
from .model import (
    Anchor,
    AssetParams,
    BgFilterParams,
    Caption,
    CaptionParams,
    CircleParams,
    ConnectorParams,
    FilterMode,
    Kind,
    MarkerParams,
    MarkerSymbol,
    PathParams,
    Placement,
    Point,
    Project,
    SpotlightParams,
    TextParams,
    ZoneParams,
    ZoomInParams,
)
from .timeline import SourceRef, map_output_frame

ELLIPSE_VERTICES = 32
GROUND_SUBDIV = 1.0 / 64.0  # max pre-image segment length, unit-square units
ARROW_BARB_PX = 14.0
ARROW_BARB_ANGLE = math.pi / 6.0
DASH_ON_PX = 12.0
DASH_OFF_PX = 8.0
PILL_COLOR = (16, 16, 16)
PILL_ALPHA8 = 160
CAPTION_MARGIN_PX = 8

Segment2 = tuple[Point, Point]


class CompositorError(ValueError):
    pass


@dataclass(frozen=True)
class EllipseDraw:
    polygon: tuple[Point, ...]
    stroke_color: tuple[int, int, int, int]
    stroke_width: float
    fill_alpha8: int


@dataclass(frozen=True)
class SpotlightDraw:
    inv_h: tuple[float, ...]  # 9 row-major reals, image px -> pre-image space
    center: Point  # pre-image space
    radius: float  # pre-image space
    color: tuple[int, int, int]
    color_alpha: int
    inner_alpha: float
    outer_alpha: float


@dataclass(frozen=True)
class StrokeDraw:
    segments: tuple[Segment2, ...]
    width: float
    color: tuple[int, int, int, int]


@dataclass(frozen=True)
class PolyFillDraw:
    polygon: tuple[Point, ...]
    color: tuple[int, int, int]
    alpha8: int


@dataclass(frozen=True)
class RingDraw:
    center: Point
    r_outer: float
    r_inner: float
    color: tuple[int, int, int, int]


@dataclass(frozen=True)
class TextDraw:
    content: str
    origin: tuple[int, int]  # top-left, px
    scale: int
    color: tuple[int, int, int, int]
    pill: bool


Shape = EllipseDraw | SpotlightDraw | StrokeDraw | PolyFillDraw | RingDraw | TextDraw


@dataclass(frozen=True)
class DrawCmd:
    object_id: str
    kind: Kind
    layer: int
    z: int
    shape: Shape


@dataclass(frozen=True)
class BgFilterState:
    color: tuple[int, int, int]
    alpha8: int
    mode: FilterMode


@dataclass(frozen=True)
class ZoomState:
    center: Point  # scene px
    factor: float


@dataclass(frozen=True)
class FramePlan:
    output_frame: int
    source: SourceRef
    draws: tuple[DrawCmd, ...]
    bg_filter: Optional[BgFilterState]
    zoom: Optional[ZoomState]
    captions: tuple[TextDraw, ...]
    width: int
    height: int


def _a8(value: float) -> int:
    return int(math.floor(value * 255.0 + 0.5))


def _scaled_alpha8(fraction: float, color_alpha: int) -> int:
    return int(math.floor(fraction * color_alpha + 0.5))


# ---------------------------------------------------------------------------
# planning


def _ground_project(h: np.ndarray, meta, p: Point) -> Point:
    return geometry.apply(h, (p[0] / meta.width, p[1] / meta.height))


def _resolve_entity_anchor(
    dataset: TrackingDataset, entity_id: str, source_frame: int, placement: Placement
) -> Optional[Point]:
    if not dataset.has_entity(entity_id):
        return None  # validation reports this; planning just drops the draw
    return resolve_anchor(dataset, entity_id, source_frame, placement)


def _resolve_anchor_value(
    dataset: TrackingDataset, anchor: Anchor, source_frame: int
) -> Optional[Point]:
    if anchor.entity_id is not None:
        return _resolve_entity_anchor(
            dataset, anchor.entity_id, source_frame, anchor.placement
        )
    return anchor.point


def _ellipse_around(
    h: np.ndarray, h_inv: np.ndarray, meta, anchor_px: Point, radius_px: float
) -> tuple[Point, ...]:
    center_pre = geometry.apply(h_inv, anchor_px)
    radius_pre = radius_px / meta.width
    poly = geometry.ellipse_for_anchor(h, center_pre, radius_pre, ELLIPSE_VERTICES)
    return tuple(poly)


def _polyline_segments(points: list[Point], closed: bool) -> tuple[Segment2, ...]:
    segs = list(zip(points, points[1:]))
    if closed and len(points) > 2:
        segs.append((points[-1], points[0]))
    return tuple(segs)


def _dash_segments(points: list[Point]) -> list[Segment2]:
    """Split a dense polyline into on-runs of a 12 px / 8 px dash pattern."""
    out: list[Segment2] = []
    period = DASH_ON_PX + DASH_OFF_PX
    pos = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        seg_len = math.hypot(x1 - x0, y1 - y0)
        if seg_len == 0.0:
            continue
        start = 0.0
        while start < seg_len:
            phase = (pos + start) % period
            if phase < DASH_ON_PX:
                run = min(DASH_ON_PX - phase, seg_len - start)
                t0, t1 = start / seg_len, (start + run) / seg_len
                out.append(
                    (
                        (x0 + (x1 - x0) * t0, y0 + (y1 - y0) * t0),
                        (x0 + (x1 - x0) * t1, y0 + (y1 - y0) * t1),
                    )
                )
                start += run
            else:
                start += period - phase
        pos += seg_len
    return out


def _arrow_barbs(points: list[Point]) -> list[Segment2]:
    tip = points[-1]
    # direction from the last distinct point to the tip
    for prev in reversed(points[:-1]):
        if prev != tip:
            break
    else:
        return []
    angle = math.atan2(tip[1] - prev[1], tip[0] - prev[0])
    barbs = []
    for sign in (1.0, -1.0):
        a = angle + math.pi + sign * ARROW_BARB_ANGLE
        barbs.append(
            (tip, (tip[0] + ARROW_BARB_PX * math.cos(a), tip[1] + ARROW_BARB_PX * math.sin(a)))
        )
    return barbs


def _text_origin(
    box_w: int, box_h: int, anchor: Point, placement: Optional[Placement], meta
) -> tuple[int, int]:
    ax, ay = anchor
    x = ax - box_w / 2.0
    if placement is Placement.HEAD:
        y = ay - box_h
    elif placement is Placement.GROUND:
        y = ay
    else:  # waist or fixed point: vertically centered
        y = ay - box_h / 2.0
    x = min(max(0.0, x), max(0.0, meta.width - box_w))
    y = min(max(0.0, y), max(0.0, meta.height - box_h))
    return int(math.floor(x + 0.5)), int(math.floor(y + 0.5))


def _marker_shape(symbol: MarkerSymbol, pos: Point, size: float, color):
    half = size / 2.0
    lw = max(2.0, size / 8.0)
    x, y = pos
    if symbol is MarkerSymbol.O:
        return RingDraw(pos, half, max(0.0, half - lw), color)
    if symbol is MarkerSymbol.X:
        segs = (
            ((x - half, y - half), (x + half, y + half)),
            ((x + half, y - half), (x - half, y + half)),
        )
        return StrokeDraw(segs, lw, color)
    # triangle: apex up, stroked
    pts = [(x, y - half), (x + half, y + half), (x - half, y + half)]
    return StrokeDraw(_polyline_segments(pts, closed=True), lw, color)


def _zoom_state(
    obj, params: ZoomInParams, dataset: TrackingDataset, n: int, source_frame: int
) -> Optional[ZoomState]:
    center = _resolve_anchor_value(dataset, params.target, source_frame)
    if center is None:
        return None
    span = obj.end_frame - obj.start_frame
    t = n - obj.start_frame
    e = params.ease_frames
    if e > 0:
        ramp = min(1.0, t / e, (span - 1 - t) / e)
        ramp = max(0.0, ramp)
    else:
        ramp = 1.0
    factor = 1.0 + (params.factor - 1.0) * ramp
    return ZoomState(center, factor)


def _caption_draws(project: Project, n: int, extra: list) -> tuple[TextDraw, ...]:
    meta = project.meta
    active: list[tuple[str, int, tuple]] = []
    for cap in project.captions:
        if cap.start_frame <= n < cap.end_frame:
            active.append((cap.text, cap.font_px, cap.color))
    active.extend(extra)
    draws = []
    y_bottom = meta.height - CAPTION_MARGIN_PX
    for text, font_px, color in active:
        box_w, box_h, scale = text_box(text, font_px)
        x = max(0, (meta.width - box_w) // 2)
        y = max(0, y_bottom - box_h)
        draws.append(TextDraw(text, (x, y), scale, color, pill=True))
        y_bottom = y - 4
    return tuple(draws)


def plan_frame(project: Project, dataset: TrackingDataset, n: int) -> FramePlan:
    duration = project.output_duration()
    if not 0 <= n < duration:
        raise CompositorError(f"output frame {n} outside [0, {duration})")
    source = map_output_frame(project.timeline, n)
    sf = source.source_frame
    meta = project.meta
    h = geometry.from_doc(list(project.homography))
    h_inv = geometry.inverse(h)

    active = sorted(
        (o for o in project.objects if o.start_frame <= n < o.end_frame),
        key=lambda o: (o.layer, o.z, o.id),
    )

    draws: list[DrawCmd] = []
    bg_filter: Optional[BgFilterState] = None
    zoom: Optional[ZoomState] = None
    caption_objects: list[tuple[str, int, tuple]] = []

    def norm(p: Point) -> Point:
        return (p[0] / meta.width, p[1] / meta.height)

    for obj in active:
        p = obj.params
        shape: Optional[Shape] = None
        if isinstance(p, (AssetParams,)) or obj.kind is Kind.FREEZE_FRAME:
            continue
        if isinstance(p, BgFilterParams):
            bg_filter = BgFilterState(p.filter_color, _a8(p.alpha), p.mode)
            continue
        if isinstance(p, ZoomInParams):
            state = _zoom_state(obj, p, dataset, n, sf)
            if state is not None:
                zoom = state
            continue
        if isinstance(p, CaptionParams):
            caption_objects.append((p.content, p.font_px, p.color))
            continue
        if isinstance(p, CircleParams):
            anchor = _resolve_entity_anchor(dataset, p.anchor_entity, sf, Placement.GROUND)
            if anchor is None:
                continue
            bbox = dataset.entity(p.anchor_entity).samples[sf].bbox
            shape = EllipseDraw(
                polygon=_ellipse_around(h, h_inv, meta, anchor, p.radius * bbox[2]),
                stroke_color=p.stroke_color,
                stroke_width=p.stroke_width,
                fill_alpha8=_scaled_alpha8(p.fill_alpha, p.stroke_color[3]),
            )
        elif isinstance(p, SpotlightParams):
            anchor = _resolve_entity_anchor(dataset, p.anchor_entity, sf, Placement.GROUND)
            if anchor is None:
                continue
            bbox = dataset.entity(p.anchor_entity).samples[sf].bbox
            center_pre = geometry.apply(h_inv, anchor)
            shape = SpotlightDraw(
                inv_h=tuple(geometry.to_doc(h_inv)),
                center=center_pre,
                radius=p.radius * bbox[2] / meta.width,
                color=p.glow_color[:3],
                color_alpha=p.glow_color[3],
                inner_alpha=p.inner_alpha,
                outer_alpha=p.outer_alpha,
            )
        elif isinstance(p, ConnectorParams):
            anchors = []
            for eid in p.anchor_entities:
                a = _resolve_entity_anchor(dataset, eid, sf, Placement.GROUND)
                if a is not None:
                    anchors.append(a)
            if len(anchors) < 2:
                continue  # skip rule: not enough entities present this frame
            shape = StrokeDraw(
                _polyline_segments(anchors, p.closed), p.line_width, p.line_color
            )
        elif isinstance(p, PathParams):
            dense = geometry.smooth_path(list(p.points))
            img = [geometry.apply(h, norm(q)) for q in dense]
            if p.dashed:
                segments = _dash_segments(img)
            else:
                segments = list(zip(img, img[1:]))
            if p.arrow_head:
                segments.extend(_arrow_barbs(img))
            shape = StrokeDraw(tuple(segments), p.width, p.color)
        elif isinstance(p, ZoneParams):
            ring = list(p.points) + [p.points[0]]
            projected = geometry.project_polyline(h, [norm(q) for q in ring], GROUND_SUBDIV)
            shape = PolyFillDraw(
                tuple(projected[:-1]),
                p.fill_color[:3],
                _scaled_alpha8(p.fill_alpha, p.fill_color[3]),
            )
        elif isinstance(p, MarkerParams):
            pos = geometry.apply(h, norm(p.position))
            shape = _marker_shape(p.symbol, pos, p.size, p.color)
        elif isinstance(p, TextParams):
            anchor = _resolve_anchor_value(dataset, p.target, sf)
            if anchor is None:
                continue
            box_w, box_h, scale = text_box(p.content, p.font_px)
            placement = p.placement if p.target.entity_id is not None else None
            origin = _text_origin(box_w, box_h, anchor, placement, meta)
            shape = TextDraw(p.content, origin, scale, p.color, p.pill)
        if shape is not None:
            draws.append(DrawCmd(obj.id, obj.kind, obj.layer, obj.z, shape))

    return FramePlan(
        output_frame=n,
        source=source,
        draws=tuple(draws),
        bg_filter=bg_filter,
        zoom=zoom,
        captions=_caption_draws(project, n, caption_objects),
        width=meta.width,
        height=meta.height,
    )


# ---------------------------------------------------------------------------
# rendering


def _poly_bbox(polygon, margin: float = 1.0):
    xs = [p[0] for p in polygon]
    ys = [p[1] for p in polygon]
    return min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin


def _draw_polygon_fill(c16, polygon, color, alpha8) -> None:
    h, w = c16.shape[:2]
    box = raster.clip_box(*_poly_bbox(polygon), w, h)
    if box is None or alpha8 <= 0:
        return
    x0, y0, x1, y1 = box
    xs = np.array([p[0] for p in polygon], dtype=np.float64)
    ys = np.array([p[1] for p in polygon], dtype=np.float64)
    raster.fill_polygon_blend(c16, x0, y0, x1, y1, xs, ys, int(alpha8),
                              color[0] * 257, color[1] * 257, color[2] * 257)


def _draw_stroke(c16, segments, width, color, alpha8) -> None:
    if not segments or alpha8 <= 0:
        return
    h, w = c16.shape[:2]
    xs = [c for seg in segments for c in (seg[0][0], seg[1][0])]
    ys = [c for seg in segments for c in (seg[0][1], seg[1][1])]
    margin = width / 2.0 + 1.0
    box = raster.clip_box(min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin, w, h)
    if box is None:
        return
    x0, y0, x1, y1 = box
    segs = np.array(
        [(s[0][0], s[0][1], s[1][0], s[1][1]) for s in segments],
        dtype=np.float64,
    )
    cover = np.zeros((y1 - y0, x1 - x0), dtype=np.uint8)
    raster.mark_stroke_cover(cover, x0, y0, segs, width / 2.0, (width / 2.0) ** 2)
    raster.blend_cover8(c16, cover, x0, y0, int(alpha8),
                        color[0] * 257, color[1] * 257, color[2] * 257)


def _draw_ring(c16, shape: RingDraw) -> None:
    h, w = c16.shape[:2]
    cx, cy = shape.center
    r = shape.r_outer
    box = raster.clip_box(cx - r - 1, cy - r - 1, cx + r + 1, cy + r + 1, w, h)
    if box is None or shape.color[3] <= 0:
        return
    x0, y0, x1, y1 = box
    px, py = raster.pixel_centers(x0, y0, x1, y1)
    d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy)
    cover = (d2 <= r * r) & (d2 >= shape.r_inner * shape.r_inner)
    raster.blend_region(c16[y0:y1, x0:x1], cover, shape.color[3], shape.color[:3])


def _draw_spotlight(c16, shape: SpotlightDraw) -> None:
    h, w = c16.shape[:2]
    inv = np.array(shape.inv_h, dtype=np.float64).reshape(3, 3)
    # image-space bbox: forward-map the pre-image circle's bounding points
    fwd = geometry.inverse(inv)
    cx, cy = shape.center
    r = shape.radius
    pts = []
    for i in range(64):
        a = 2.0 * math.pi * i / 64
        try:
            pts.append(geometry.apply(fwd, (cx + r * math.cos(a), cy + r * math.sin(a))))
        except geometry.GeometryError:
            return
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    margin = 2.0 + 0.02 * max(max(xs) - min(xs), max(ys) - min(ys))
    box = raster.clip_box(*_poly_bbox(pts, margin=margin), w, h)
    if box is None:
        return
    x0, y0, x1, y1 = box
    px, py = raster.pixel_centers(x0, y0, x1, y1)
    denom = inv[2, 0] * px + inv[2, 1] * py + inv[2, 2]
    ok = np.abs(denom) >= geometry.DEGENERATE_EPS
    safe = np.where(ok, denom, 1.0)
    qx = (inv[0, 0] * px + inv[0, 1] * py + inv[0, 2]) / safe
    qy = (inv[1, 0] * px + inv[1, 1] * py + inv[1, 2]) / safe
    rr = np.sqrt((qx - cx) * (qx - cx) + (qy - cy) * (qy - cy)) / r
    cover = ok & (rr <= 1.0)
    grad = shape.inner_alpha + (shape.outer_alpha - shape.inner_alpha) * rr
    alpha8 = np.floor(grad * shape.color_alpha + 0.5).astype(np.int64)
    raster.blend_region(c16[y0:y1, x0:x1], cover, alpha8, shape.color)


def _pill_cover(px, py, x0, y0, x1, y1, radius):
    cx = (x0 + x1) / 2.0
    cy = (y0 + y1) / 2.0
    hw = (x1 - x0) / 2.0 - radius
    hh = (y1 - y0) / 2.0 - radius
    dx = np.maximum(np.abs(px - cx) - hw, 0.0)
    dy = np.maximum(np.abs(py - cy) - hh, 0.0)
    return dx * dx + dy * dy <= radius * radius


def _draw_text(c16, shape: TextDraw) -> None:
    from .font import text_bitmap

    h, w = c16.shape[:2]
    bitmap = text_bitmap(shape.content, shape.scale)
    bh, bw = bitmap.shape
    ox, oy = shape.origin
    if shape.pill and bw > 0:
        pad = 4.0 * shape.scale
        px0, py0 = ox - pad, oy - pad
        px1, py1 = ox + bw + pad, oy + bh + pad
        box = raster.clip_box(px0, py0, px1, py1, w, h)
        if box is not None:
            x0, y0, x1, y1 = box
            px, py = raster.pixel_centers(x0, y0, x1, y1)
            cover = _pill_cover(px, py, px0, py0, px1, py1, pad)
            raster.blend_region(c16[y0:y1, x0:x1], cover, PILL_ALPHA8, PILL_COLOR)
    # clip the bitmap to the frame
    sx0, sy0 = max(0, -ox), max(0, -oy)
    dx0, dy0 = max(0, ox), max(0, oy)
    cw = min(bw - sx0, w - dx0)
    ch = min(bh - sy0, h - dy0)
    if cw <= 0 or ch <= 0:
        return
    cover = bitmap[sy0 : sy0 + ch, sx0 : sx0 + cw]
    raster.blend_region(
        c16[dy0 : dy0 + ch, dx0 : dx0 + cw], cover, shape.color[3], shape.color[:3]
    )


def _draw_shape(c16, shape: Shape) -> None:
    if isinstance(shape, EllipseDraw):
        _draw_polygon_fill(c16, shape.polygon, shape.stroke_color[:3], shape.fill_alpha8)
        outline = _polyline_segments(list(shape.polygon), closed=True)
        _draw_stroke(c16, outline, shape.stroke_width, shape.stroke_color[:3],
                     shape.stroke_color[3])
    elif isinstance(shape, SpotlightDraw):
        _draw_spotlight(c16, shape)
    elif isinstance(shape, StrokeDraw):
        _draw_stroke(c16, shape.segments, shape.width, shape.color[:3], shape.color[3])
    elif isinstance(shape, PolyFillDraw):
        _draw_polygon_fill(c16, shape.polygon, shape.color, shape.alpha8)
    elif isinstance(shape, RingDraw):
        _draw_ring(c16, shape)
    elif isinstance(shape, TextDraw):
        _draw_text(c16, shape)


def render_frame(plan: FramePlan, bg_image: np.ndarray, mask_plane: np.ndarray) -> np.ndarray:
    """Rasterize a plan onto a background frame; returns (h, w, 3) uint8."""
    h, w = plan.height, plan.width
    if bg_image.shape != (h, w, 3):
        raise CompositorError(
            f"background is {bg_image.shape}, expected {(h, w, 3)}"
        )
    if mask_plane.shape != (h, w):
        raise CompositorError(f"mask is {mask_plane.shape}, expected {(h, w)}")

    c16 = np.empty((h, w, 3), dtype=np.uint16)
    if plan.bg_filter is not None and plan.bg_filter.mode is FilterMode.GRAYSCALE:
        raster.lift_and_gray(bg_image, plan.bg_filter.alpha8, c16)
    else:
        if plan.bg_filter is None:
            fr = fg = fb = 0
            a8 = 0
        else:
            r8, g8, b8 = plan.bg_filter.color
            fr, fg, fb = r8 * 257, g8 * 257, b8 * 257
            a8 = plan.bg_filter.alpha8
        lut_r, lut_g, lut_b = raster.make_lift_luts(fr, fg, fb, a8)
        raster.lift_lut16(bg_image, lut_r, lut_g, lut_b, c16)

    for cmd in plan.draws:
        if cmd.layer < 20:
            _draw_shape(c16, cmd.shape)

    raster.composite_foreground(c16, mask_plane, bg_image)

    for cmd in plan.draws:
        if cmd.layer >= 20:
            _draw_shape(c16, cmd.shape)

    if plan.zoom is not None and plan.zoom.factor > 1.0:
        f = plan.zoom.factor
        win_w, win_h = w / f, h / f
        x0 = min(max(0.0, plan.zoom.center[0] - win_w / 2.0), w - win_w)
        y0 = min(max(0.0, plan.zoom.center[1] - win_h / 2.0), h - win_h)
        out16 = np.empty_like(c16)
        raster.zoom_bilinear(c16, x0, y0, win_w / w, win_h / h, out16)
        c16 = out16

    for cap in plan.captions:
        _draw_text(c16, cap)

    out8 = np.empty((h, w, 3), dtype=np.uint8)
    raster.quantize8(c16, out8)
    return out8


# ---------------------------------------------------------------------------
# hit testing


def hit_test(
    project: Project, dataset: TrackingDataset, n: int, screen_point: Point
) -> Optional[str]:
    """Entity under a screen click: undo the frame's zoom, then pick the
    smallest containing bbox at the mapped source frame (ties by id)."""
    plan = plan_frame(project, dataset, n)
    x, y = screen_point
    if plan.zoom is not None and plan.zoom.factor > 1.0:
        w, h = plan.width, plan.height
        f = plan.zoom.factor
        win_w, win_h = w / f, h / f
        x0 = min(max(0.0, plan.zoom.center[0] - win_w / 2.0), w - win_w)
        y0 = min(max(0.0, plan.zoom.center[1] - win_h / 2.0), h - win_h)
        x = x0 + (x + 0.5) * (win_w / w) - 0.5
        y = y0 + (y + 0.5) * (win_h / h) - 0.5
    sf = plan.source.source_frame
    best: Optional[tuple[float, str]] = None
    for track in dataset.entities:
        sample = track.samples.get(sf)
        if sample is None:
            continue
        bx, by, bw, bh = sample.bbox
        if bx <= x <= bx + bw and by <= y <= by + bh:
            key = (bw * bh, track.entity_id)
            if best is None or key < best:
                best = key
    return best[1] if best else None
