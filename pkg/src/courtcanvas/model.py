"""Shared domain types, the project document schema, and validation.

Everything here is an immutable value.  Frame spans are half-open
[start, end) in output-frame indices.  Colors are 8-bit-per-channel RGBA
with straight (non-premultiplied) alpha; premultiplication is the
compositor's business.  Scene-space points are pixel coordinates of the
unzoomed source frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from . import timeline as tl_mod
from .timeline import Timeline

SCHEMA_VERSION = 1

RGBA = tuple[int, int, int, int]
RGB = tuple[int, int, int]
Point = tuple[float, float]


class ProjectDecodeError(ValueError):
    pass


class Kind(str, Enum):
    CIRCLE = "circle"
    SPOTLIGHT = "spotlight"
    CONNECTOR = "connector"
    PATH = "path"
    ZONE = "zone"
    MARKER = "marker"
    BG_FILTER = "bg_filter"
    ZOOM_IN = "zoom_in"
    TEXT = "text"
    CAPTION = "caption"
    FREEZE_FRAME = "freeze_frame"
    BACKGROUND = "background"
    FOREGROUND = "foreground"


class Placement(str, Enum):
    HEAD = "head"
    WAIST = "waist"
    GROUND = "ground"


class MarkerSymbol(str, Enum):
    O = "o"
    X = "x"
    TRIANGLE = "triangle"


class FilterMode(str, Enum):
    TINT = "tint"
    GRAYSCALE = "grayscale"


# Rendering order slots; authors may reorder z within a layer but a kind's
# layer is fixed (smaller layers render first).
DEFAULT_LAYER: dict[Kind, int] = {
    Kind.BACKGROUND: 0,
    Kind.FREEZE_FRAME: 0,
    Kind.BG_FILTER: 5,
    Kind.CIRCLE: 10,
    Kind.SPOTLIGHT: 10,
    Kind.PATH: 10,
    Kind.ZONE: 10,
    Kind.MARKER: 10,
    Kind.FOREGROUND: 20,
    Kind.CONNECTOR: 30,
    Kind.TEXT: 30,
    Kind.CAPTION: 40,
    Kind.ZOOM_IN: 50,
}


@dataclass(frozen=True)
class VideoMeta:
    width: int
    height: int
    fps: Fraction
    frame_count: int


@dataclass(frozen=True)
class Anchor:
    """Either a tracked entity at a placement, or a fixed scene point."""

    entity_id: Optional[str] = None
    placement: Optional[Placement] = None
    point: Optional[Point] = None

    def is_entity(self) -> bool:
        return self.entity_id is not None


@dataclass(frozen=True)
class CircleParams:
    anchor_entity: str
    radius: float = 0.9  # fraction of bbox width
    stroke_color: RGBA = (255, 214, 0, 255)
    stroke_width: float = 3.0
    fill_alpha: float = 0.2


@dataclass(frozen=True)
class SpotlightParams:
    anchor_entity: str
    glow_color: RGBA = (255, 240, 150, 255)
    radius: float = 1.2
    inner_alpha: float = 0.75
    outer_alpha: float = 0.0


@dataclass(frozen=True)
class ConnectorParams:
    anchor_entities: tuple[str, ...]
    line_color: RGBA = (80, 220, 100, 255)
    line_width: float = 3.0
    closed: bool = False


@dataclass(frozen=True)
class PathParams:
    points: tuple[Point, ...]
    color: RGBA = (80, 220, 100, 255)
    width: float = 4.0
    arrow_head: bool = True
    dashed: bool = False


@dataclass(frozen=True)
class ZoneParams:
    points: tuple[Point, ...]
    fill_color: RGBA = (80, 220, 100, 255)
    fill_alpha: float = 0.35


@dataclass(frozen=True)
class MarkerParams:
    symbol: MarkerSymbol
    position: Point
    color: RGBA = (255, 255, 255, 255)
    size: float = 24.0


@dataclass(frozen=True)
class BgFilterParams:
    filter_color: RGB = (40, 40, 40)
    alpha: float = 0.6
    mode: FilterMode = FilterMode.TINT


@dataclass(frozen=True)
class ZoomInParams:
    target: Anchor
    factor: float = 2.0
    ease_frames: int = 15


@dataclass(frozen=True)
class TextParams:
    content: str
    target: Anchor
    placement: Optional[Placement] = None
    font_px: int = 24
    color: RGBA = (255, 255, 255, 255)
    pill: bool = True


@dataclass(frozen=True)
class CaptionParams:
    content: str
    font_px: int = 24
    color: RGBA = (255, 255, 255, 255)


@dataclass(frozen=True)
class FreezeFrameParams:
    pass


@dataclass(frozen=True)
class AssetParams:
    asset_ref: str


EffectParams = (
    CircleParams
    | SpotlightParams
    | ConnectorParams
    | PathParams
    | ZoneParams
    | MarkerParams
    | BgFilterParams
    | ZoomInParams
    | TextParams
    | CaptionParams
    | FreezeFrameParams
    | AssetParams
)

PARAMS_CLASS: dict[Kind, type] = {
    Kind.CIRCLE: CircleParams,
    Kind.SPOTLIGHT: SpotlightParams,
    Kind.CONNECTOR: ConnectorParams,
    Kind.PATH: PathParams,
    Kind.ZONE: ZoneParams,
    Kind.MARKER: MarkerParams,
    Kind.BG_FILTER: BgFilterParams,
    Kind.ZOOM_IN: ZoomInParams,
    Kind.TEXT: TextParams,
    Kind.CAPTION: CaptionParams,
    Kind.FREEZE_FRAME: FreezeFrameParams,
    Kind.BACKGROUND: AssetParams,
    Kind.FOREGROUND: AssetParams,
}


@dataclass(frozen=True)
class RenderObject:
    id: str
    kind: Kind
    start_frame: int
    end_frame: int  # exclusive
    layer: int
    z: int
    params: EffectParams


@dataclass(frozen=True)
class Caption:
    text: str
    start_frame: int
    end_frame: int
    font_px: int = 24
    color: RGBA = (255, 255, 255, 255)


@dataclass(frozen=True)
class ExportSettings:
    format: str = "png"
    burn_in: bool = True
    workers: int = 0  # 0 = logical cores


@dataclass(frozen=True)
class Project:
    schema_version: int
    video_ref: str
    tracking_ref: str
    mask_ref: str
    meta: VideoMeta
    timeline: Timeline
    objects: tuple[RenderObject, ...]
    captions: tuple[Caption, ...]
    homography: tuple[float, ...]  # 9 row-major reals, (3,3) normalized to 1
    export: ExportSettings = ExportSettings()
    extra: tuple[tuple[str, Any], ...] = ()  # unknown future fields, preserved

    def output_duration(self) -> int:
        return tl_mod.output_duration(self.timeline)


def new_project(
    video_ref: str,
    tracking_ref: str,
    mask_ref: str,
    meta: VideoMeta,
    homography: tuple[float, ...],
) -> Project:
    """Freshly imported clip: identity timeline plus the mandatory
    background/foreground objects spanning it."""
    tl = Timeline.identity(meta.frame_count)
    duration = tl_mod.output_duration(tl)
    objects = (
        RenderObject(
            "background", Kind.BACKGROUND, 0, duration,
            DEFAULT_LAYER[Kind.BACKGROUND], 0, AssetParams(video_ref),
        ),
        RenderObject(
            "foreground", Kind.FOREGROUND, 0, duration,
            DEFAULT_LAYER[Kind.FOREGROUND], 0, AssetParams(mask_ref),
        ),
    )
    return Project(
        schema_version=SCHEMA_VERSION,
        video_ref=video_ref,
        tracking_ref=tracking_ref,
        mask_ref=mask_ref,
        meta=meta,
        timeline=tl,
        objects=objects,
        captions=(),
        homography=homography,
    )


def respan_asset_objects(project: Project) -> Project:
    """Resize the background/foreground objects to the current duration.

    Called after timeline edits so the exactly-one-spanning invariant holds.
    """
    duration = project.output_duration()
    objects = tuple(
        replace(o, start_frame=0, end_frame=duration)
        if o.kind in (Kind.BACKGROUND, Kind.FOREGROUND)
        else o
        for o in project.objects
    )
    return replace(project, objects=objects)


# ---------------------------------------------------------------------------
# validation


def _color_ok(c, channels: int) -> bool:
    return (
        isinstance(c, tuple)
        and len(c) == channels
        and all(isinstance(v, int) and 0 <= v <= 255 for v in c)
    )


def _segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    def on_seg(p, q, r):
        return (
            min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
            and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])
        )

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_seg(a, b, c):
        return True
    if o2 == 0 and on_seg(a, b, d):
        return True
    if o3 == 0 and on_seg(c, d, a):
        return True
    if o4 == 0 and on_seg(c, d, b):
        return True
    return False


def polygon_is_simple(points: tuple[Point, ...]) -> bool:
    n = len(points)
    edges = [(points[i], points[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def _validate_anchor(anchor: Anchor, meta: VideoMeta, where: str) -> list[str]:
    out = []
    if anchor.entity_id is not None:
        if anchor.placement is None:
            out.append(f"{where}.placement: entity anchors require a placement")
        if anchor.point is not None:
            out.append(f"{where}: anchor cannot be both entity and fixed point")
    elif anchor.point is not None:
        x, y = anchor.point
        if not (0 <= x <= meta.width and 0 <= y <= meta.height):
            out.append(f"{where}.point: outside scene bounds")
    else:
        out.append(f"{where}: anchor needs an entity_id or a point")
    return out


def _unit(v: float) -> bool:
    return isinstance(v, (int, float)) and 0.0 <= v <= 1.0


def _validate_params(obj: RenderObject, meta: VideoMeta, where: str) -> list[str]:
    p = obj.params
    out: list[str] = []
    expected = PARAMS_CLASS[obj.kind]
    if not isinstance(p, expected):
        return [f"{where}.params: expected {expected.__name__} for kind {obj.kind.value}"]
    if isinstance(p, CircleParams):
        if p.radius <= 0:
            out.append(f"{where}.params.radius: must be > 0")
        if not _color_ok(p.stroke_color, 4):
            out.append(f"{where}.params.stroke_color: must be RGBA 0..255")
        if not _unit(p.fill_alpha):
            out.append(f"{where}.params.fill_alpha: must lie in [0, 1]")
    elif isinstance(p, SpotlightParams):
        if p.radius <= 0:
            out.append(f"{where}.params.radius: must be > 0")
        if not _color_ok(p.glow_color, 4):
            out.append(f"{where}.params.glow_color: must be RGBA 0..255")
        if not (_unit(p.inner_alpha) and _unit(p.outer_alpha)):
            out.append(f"{where}.params: alphas must lie in [0, 1]")
    elif isinstance(p, ConnectorParams):
        if len(set(p.anchor_entities)) < 2:
            out.append(f"{where}.params.anchor_entities: need >= 2 distinct entities")
        if not _color_ok(p.line_color, 4):
            out.append(f"{where}.params.line_color: must be RGBA 0..255")
    elif isinstance(p, PathParams):
        if len(p.points) < 2:
            out.append(f"{where}.params.points: need >= 2 points")
        if not _color_ok(p.color, 4):
            out.append(f"{where}.params.color: must be RGBA 0..255")
    elif isinstance(p, ZoneParams):
        if len(p.points) < 3:
            out.append(f"{where}.params.points: need >= 3 points")
        elif not polygon_is_simple(p.points):
            out.append(f"{where}.params.points: polygon must be simple")
        if not _color_ok(p.fill_color, 4):
            out.append(f"{where}.params.fill_color: must be RGBA 0..255")
        if not _unit(p.fill_alpha):
            out.append(f"{where}.params.fill_alpha: must lie in [0, 1]")
    elif isinstance(p, MarkerParams):
        if p.size <= 0:
            out.append(f"{where}.params.size: must be > 0")
        if not _color_ok(p.color, 4):
            out.append(f"{where}.params.color: must be RGBA 0..255")
    elif isinstance(p, BgFilterParams):
        if not _color_ok(p.filter_color, 3):
            out.append(f"{where}.params.filter_color: must be RGB 0..255")
        if not _unit(p.alpha):
            out.append(f"{where}.params.alpha: must lie in [0, 1]")
    elif isinstance(p, ZoomInParams):
        if not 1.0 <= p.factor <= 4.0:
            out.append(f"{where}.params.factor: must lie in [1.0, 4.0]")
        if p.ease_frames < 0:
            out.append(f"{where}.params.ease_frames: must be >= 0")
        out.extend(_validate_anchor(p.target, meta, f"{where}.params.target"))
    elif isinstance(p, TextParams):
        if p.font_px < 1:
            out.append(f"{where}.params.font_px: must be >= 1")
        if not _color_ok(p.color, 4):
            out.append(f"{where}.params.color: must be RGBA 0..255")
        out.extend(_validate_anchor(p.target, meta, f"{where}.params.target"))
        if p.target.entity_id is not None and p.placement is None:
            out.append(f"{where}.params.placement: required for entity-anchored text")
    elif isinstance(p, CaptionParams):
        if p.font_px < 1:
            out.append(f"{where}.params.font_px: must be >= 1")
        if not _color_ok(p.color, 4):
            out.append(f"{where}.params.color: must be RGBA 0..255")
    return out


def validate_project(project: Project, dataset=None) -> list[str]:
    """Every type invariant, as violation strings ("path: rule").

    dataset, when given, enables anchor-resolution checks (unknown entity
    ids).  Violations are values; nothing raises.
    """
    out: list[str] = []
    meta = project.meta
    if meta.width < 16 or meta.width % 2:
        out.append("meta.width: must be an even int >= 16")
    if meta.height < 16 or meta.height % 2:
        out.append("meta.height: must be an even int >= 16")
    if meta.fps <= 0:
        out.append("meta.fps: must be > 0")
    if meta.frame_count < 1:
        out.append("meta.frame_count: must be >= 1")
    out.extend(tl_mod.validate(project.timeline, meta.frame_count))
    if out:
        return out  # duration is meaningless below if the timeline is broken

    duration = project.output_duration()
    known_entities = (
        {t.entity_id for t in dataset.entities} if dataset is not None else None
    )

    def check_entity(eid: str, where: str) -> None:
        if known_entities is not None and eid not in known_entities:
            out.append(f"{where}: entity {eid!r} not in tracking dataset")

    seen_ids: set[str] = set()
    bg = fg = 0
    for i, obj in enumerate(project.objects):
        where = f"objects[{i}]"
        if obj.id in seen_ids:
            out.append(f"{where}.id: duplicate id {obj.id!r}")
        seen_ids.add(obj.id)
        if obj.end_frame <= obj.start_frame:
            out.append(f"{where}.end_frame: must exceed start_frame")
        if obj.start_frame < 0 or obj.end_frame > duration:
            out.append(f"{where}: span must lie within [0, {duration})")
        if obj.layer != DEFAULT_LAYER[obj.kind]:
            out.append(
                f"{where}.layer: kind {obj.kind.value} is fixed to layer "
                f"{DEFAULT_LAYER[obj.kind]}"
            )
        out.extend(_validate_params(obj, meta, where))
        p = obj.params
        if isinstance(p, CircleParams):
            check_entity(p.anchor_entity, f"{where}.params.anchor_entity")
        elif isinstance(p, SpotlightParams):
            check_entity(p.anchor_entity, f"{where}.params.anchor_entity")
        elif isinstance(p, ConnectorParams):
            for eid in p.anchor_entities:
                check_entity(eid, f"{where}.params.anchor_entities")
        elif isinstance(p, (ZoomInParams, TextParams)):
            if p.target.entity_id is not None:
                check_entity(p.target.entity_id, f"{where}.params.target")
        if obj.kind is Kind.BACKGROUND:
            bg += 1
            if (obj.start_frame, obj.end_frame) != (0, duration):
                out.append(f"{where}: background must span the whole timeline")
        if obj.kind is Kind.FOREGROUND:
            fg += 1
            if (obj.start_frame, obj.end_frame) != (0, duration):
                out.append(f"{where}: foreground must span the whole timeline")
    if bg != 1:
        out.append(f"objects: exactly one background object required (found {bg})")
    if fg != 1:
        out.append(f"objects: exactly one foreground object required (found {fg})")

    ordered = sorted(
        range(len(project.captions)), key=lambda i: project.captions[i].start_frame
    )
    prev_end, prev_idx = None, None
    for i in ordered:
        cap = project.captions[i]
        where = f"captions[{i}]"
        if cap.end_frame <= cap.start_frame:
            out.append(f"{where}.end_frame: must exceed start_frame")
        if cap.start_frame < 0 or cap.end_frame > duration:
            out.append(f"{where}: span must lie within [0, {duration})")
        if not _color_ok(cap.color, 4):
            out.append(f"{where}.color: must be RGBA 0..255")
        if prev_end is not None and cap.start_frame < prev_end:
            out.append(f"{where}: overlaps captions[{prev_idx}]")
        prev_end, prev_idx = cap.end_frame, i

    if len(project.homography) != 9:
        out.append("homography: expected 9 row-major reals")
    else:
        try:
            from . import geometry

            geometry.from_doc(list(project.homography))
        except Exception:
            out.append("homography: must be invertible with (3,3) = 1")
    return out


# ---------------------------------------------------------------------------
# serialization


def _anchor_to_doc(a: Anchor) -> dict:
    if a.entity_id is not None:
        return {"entity_id": a.entity_id, "placement": a.placement.value}
    return {"point": list(a.point)}


def _anchor_from_doc(d, where: str) -> Anchor:
    if not isinstance(d, dict):
        raise ProjectDecodeError(f"{where}: anchor must be an object")
    if "entity_id" in d:
        try:
            placement = Placement(d["placement"])
        except (KeyError, ValueError) as exc:
            raise ProjectDecodeError(f"{where}.placement: {exc}") from exc
        return Anchor(entity_id=str(d["entity_id"]), placement=placement)
    if "point" in d:
        x, y = d["point"]
        return Anchor(point=(float(x), float(y)))
    raise ProjectDecodeError(f"{where}: anchor needs entity_id or point")


def _params_to_doc(p: EffectParams) -> dict:
    if isinstance(p, ZoomInParams):
        return {
            "target": _anchor_to_doc(p.target),
            "factor": p.factor,
            "ease_frames": p.ease_frames,
        }
    if isinstance(p, TextParams):
        d = {
            "content": p.content,
            "target": _anchor_to_doc(p.target),
            "font_px": p.font_px,
            "color": list(p.color),
            "pill": p.pill,
        }
        if p.placement is not None:
            d["placement"] = p.placement.value
        return d
    out: dict[str, Any] = {}
    for name, value in vars(p).items():
        if isinstance(value, Enum):
            out[name] = value.value
        elif isinstance(value, tuple):
            out[name] = [list(v) if isinstance(v, tuple) else v for v in value]
        else:
            out[name] = value
    return out


def _params_from_doc(kind: Kind, d: dict, where: str) -> EffectParams:
    def color(key, channels=4, default=None):
        v = d.get(key, default)
        if v is None:
            raise ProjectDecodeError(f"{where}.{key}: missing")
        if not (isinstance(v, list) and len(v) == channels):
            raise ProjectDecodeError(f"{where}.{key}: expected {channels} channels")
        return tuple(int(c) for c in v)

    def points(key, as_tuple=True):
        v = d.get(key)
        if not isinstance(v, list):
            raise ProjectDecodeError(f"{where}.{key}: expected a point list")
        return tuple((float(p[0]), float(p[1])) for p in v)

    try:
        if kind is Kind.CIRCLE:
            return CircleParams(
                anchor_entity=str(d["anchor_entity"]),
                radius=float(d.get("radius", 0.9)),
                stroke_color=color("stroke_color", 4, [255, 214, 0, 255]),
                stroke_width=float(d.get("stroke_width", 3.0)),
                fill_alpha=float(d.get("fill_alpha", 0.2)),
            )
        if kind is Kind.SPOTLIGHT:
            return SpotlightParams(
                anchor_entity=str(d["anchor_entity"]),
                glow_color=color("glow_color", 4, [255, 240, 150, 255]),
                radius=float(d.get("radius", 1.2)),
                inner_alpha=float(d.get("inner_alpha", 0.75)),
                outer_alpha=float(d.get("outer_alpha", 0.0)),
            )
        if kind is Kind.CONNECTOR:
            return ConnectorParams(
                anchor_entities=tuple(str(e) for e in d["anchor_entities"]),
                line_color=color("line_color", 4, [80, 220, 100, 255]),
                line_width=float(d.get("line_width", 3.0)),
                closed=bool(d.get("closed", False)),
            )
        if kind is Kind.PATH:
            return PathParams(
                points=points("points"),
                color=color("color", 4, [80, 220, 100, 255]),
                width=float(d.get("width", 4.0)),
                arrow_head=bool(d.get("arrow_head", True)),
                dashed=bool(d.get("dashed", False)),
            )
        if kind is Kind.ZONE:
            return ZoneParams(
                points=points("points"),
                fill_color=color("fill_color", 4, [80, 220, 100, 255]),
                fill_alpha=float(d.get("fill_alpha", 0.35)),
            )
        if kind is Kind.MARKER:
            pos = d["position"]
            return MarkerParams(
                symbol=MarkerSymbol(d["symbol"]),
                position=(float(pos[0]), float(pos[1])),
                color=color("color", 4, [255, 255, 255, 255]),
                size=float(d.get("size", 24.0)),
            )
        if kind is Kind.BG_FILTER:
            return BgFilterParams(
                filter_color=color("filter_color", 3, [40, 40, 40]),
                alpha=float(d.get("alpha", 0.6)),
                mode=FilterMode(d.get("mode", "tint")),
            )
        if kind is Kind.ZOOM_IN:
            return ZoomInParams(
                target=_anchor_from_doc(d["target"], f"{where}.target"),
                factor=float(d.get("factor", 2.0)),
                ease_frames=int(d.get("ease_frames", 15)),
            )
        if kind is Kind.TEXT:
            placement = d.get("placement")
            return TextParams(
                content=str(d["content"]),
                target=_anchor_from_doc(d["target"], f"{where}.target"),
                placement=Placement(placement) if placement is not None else None,
                font_px=int(d.get("font_px", 24)),
                color=color("color", 4, [255, 255, 255, 255]),
                pill=bool(d.get("pill", True)),
            )
        if kind is Kind.CAPTION:
            return CaptionParams(
                content=str(d["content"]),
                font_px=int(d.get("font_px", 24)),
                color=color("color", 4, [255, 255, 255, 255]),
            )
        if kind is Kind.FREEZE_FRAME:
            return FreezeFrameParams()
        return AssetParams(asset_ref=str(d["asset_ref"]))
    except ProjectDecodeError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ProjectDecodeError(f"{where}: malformed params ({exc})") from exc


def object_to_doc(o: RenderObject) -> dict:
    return {
        "id": o.id,
        "kind": o.kind.value,
        "start_frame": o.start_frame,
        "end_frame": o.end_frame,
        "layer": o.layer,
        "z": o.z,
        "params": _params_to_doc(o.params),
    }


def object_from_doc(od: dict, where: str = "object") -> RenderObject:
    try:
        kind = Kind(od["kind"])
        return RenderObject(
            id=str(od["id"]),
            kind=kind,
            start_frame=int(od["start_frame"]),
            end_frame=int(od["end_frame"]),
            layer=int(od.get("layer", DEFAULT_LAYER[kind])),
            z=int(od.get("z", 0)),
            params=_params_from_doc(kind, od.get("params", {}), where + ".params"),
        )
    except ProjectDecodeError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ProjectDecodeError(f"{where}: malformed ({exc})") from exc


def caption_to_doc(c: Caption) -> dict:
    return {
        "text": c.text,
        "start_frame": c.start_frame,
        "end_frame": c.end_frame,
        "style": {"font_px": c.font_px, "color": list(c.color)},
    }


def caption_from_doc(cd: dict, where: str = "caption") -> Caption:
    try:
        style = cd.get("style", {})
        color = style.get("color", [255, 255, 255, 255])
        return Caption(
            text=str(cd["text"]),
            start_frame=int(cd["start_frame"]),
            end_frame=int(cd["end_frame"]),
            font_px=int(style.get("font_px", 24)),
            color=tuple(int(c) for c in color),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProjectDecodeError(f"{where}: malformed ({exc})") from exc


def project_to_doc(project: Project) -> dict:
    doc: dict[str, Any] = {
        "schema_version": project.schema_version,
        "video_ref": project.video_ref,
        "tracking_ref": project.tracking_ref,
        "mask_ref": project.mask_ref,
        "meta": {
            "width": project.meta.width,
            "height": project.meta.height,
            "fps": [project.meta.fps.numerator, project.meta.fps.denominator],
            "frame_count": project.meta.frame_count,
        },
        "timeline": tl_mod.to_doc(project.timeline),
        "objects": [object_to_doc(o) for o in project.objects],
        "captions": [caption_to_doc(c) for c in project.captions],
        "homography": list(project.homography),
        "export": {
            "format": project.export.format,
            "burn_in": project.export.burn_in,
            "workers": project.export.workers,
        },
    }
    doc.update(dict(project.extra))
    return doc


_KNOWN_KEYS = {
    "schema_version", "video_ref", "tracking_ref", "mask_ref", "meta",
    "timeline", "objects", "captions", "homography", "export",
}


def project_from_doc(doc: dict) -> Project:
    if not isinstance(doc, dict):
        raise ProjectDecodeError("project document must be a JSON object")
    version = doc.get("schema_version")
    if not isinstance(version, int):
        raise ProjectDecodeError("schema_version: missing or not an int")
    if version > SCHEMA_VERSION:
        raise ProjectDecodeError(
            f"schema_version {version} not supported (max {SCHEMA_VERSION})"
        )
    for key in ("video_ref", "tracking_ref", "mask_ref", "meta", "timeline",
                "objects", "homography"):
        if key not in doc:
            raise ProjectDecodeError(f"{key}: missing required field")
    m = doc["meta"]
    try:
        meta = VideoMeta(
            width=int(m["width"]),
            height=int(m["height"]),
            fps=Fraction(int(m["fps"][0]), int(m["fps"][1])),
            frame_count=int(m["frame_count"]),
        )
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise ProjectDecodeError(f"meta: malformed ({exc})") from exc
    try:
        tl = tl_mod.from_doc(doc["timeline"])
    except tl_mod.TimelineError as exc:
        raise ProjectDecodeError(str(exc)) from exc

    objects = [
        object_from_doc(od, f"objects[{i}]") for i, od in enumerate(doc["objects"])
    ]
    captions = [
        caption_from_doc(cd, f"captions[{i}]")
        for i, cd in enumerate(doc.get("captions", []))
    ]

    h = doc["homography"]
    if not (isinstance(h, list) and len(h) == 9):
        raise ProjectDecodeError("homography: expected 9 row-major reals")
    e = doc.get("export", {})
    export = ExportSettings(
        format=str(e.get("format", "png")),
        burn_in=bool(e.get("burn_in", True)),
        workers=int(e.get("workers", 0)),
    )
    extra = tuple((k, doc[k]) for k in doc if k not in _KNOWN_KEYS)
    return Project(
        schema_version=version,
        video_ref=str(doc["video_ref"]),
        tracking_ref=str(doc["tracking_ref"]),
        mask_ref=str(doc["mask_ref"]),
        meta=meta,
        timeline=tl,
        objects=tuple(objects),
        captions=tuple(captions),
        homography=tuple(float(v) for v in h),
        export=export,
        extra=extra,
    )


def encode_project(project: Project) -> bytes:
    return json.dumps(project_to_doc(project), ensure_ascii=False, sort_keys=True).encode(
        "utf-8"
    )


def decode_project(data: bytes) -> Project:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ProjectDecodeError(f"not valid UTF-8 at byte {exc.start}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProjectDecodeError(f"malformed JSON at byte {exc.pos}: {exc.msg}") from exc
    return project_from_doc(doc)
