"""Shared builders: deterministic scenes, valid random projects, on-disk
asset trees, and the end-to-end authoring scenario used by several suites."""

from __future__ import annotations

import os
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from PIL import Image

from courtcanvas import geometry, model, synth
from courtcanvas import timeline as tl_mod
from courtcanvas.model import (
    Anchor,
    BgFilterParams,
    CaptionParams,
    CircleParams,
    ConnectorParams,
    FilterMode,
    Kind,
    MarkerParams,
    MarkerSymbol,
    PathParams,
    Placement,
    RenderObject,
    SpotlightParams,
    TextParams,
    ZoneParams,
    ZoomInParams,
    DEFAULT_LAYER,
)


def make_scene(seed=0, width=64, height=36, frame_count=30, n_entities=2,
               fps=Fraction(30, 1)):
    """Deterministic scene with n entities that stay in frame."""
    rng = np.random.RandomState(seed)
    scripts = []
    for i in range(n_entities):
        w = int(rng.randint(3, max(4, width // 8)))
        h = int(rng.randint(4, max(5, height // 3)))
        # choose endpoints inside the frame, derive a constant velocity
        x0 = float(rng.uniform(0, width - w - 1))
        y0 = float(rng.uniform(0, height - h - 1))
        x1 = float(rng.uniform(0, width - w - 1))
        y1 = float(rng.uniform(0, height - h - 1))
        steps = max(1, frame_count - 1)
        scripts.append(synth.EntityScript(
            entity_id=str(i + 1),
            start=(x0, y0),
            velocity=((x1 - x0) / steps, (y1 - y0) / steps),
            size=(w, h),
        ))
    spec = synth.SceneSpec(width=width, height=height, fps=fps,
                           frame_count=frame_count, entities=tuple(scripts))
    return synth.generate_scene(spec, seed)


def default_h(scene):
    return tuple(geometry.to_doc(
        geometry.default_ground_homography(scene.meta.width, scene.meta.height)
    ))


def base_project(scene, video_ref="frames", tracking_ref="tracking.json",
                 mask_ref="masks"):
    return model.new_project(video_ref, tracking_ref, mask_ref, scene.meta,
                             default_h(scene))


def with_objects(project, objects, captions=()):
    return replace(
        project,
        objects=project.objects + tuple(objects),
        captions=project.captions + tuple(captions),
    )


def _obj(ident, kind, span, params, z=0):
    return RenderObject(ident, kind, span[0], span[1], DEFAULT_LAYER[kind], z, params)


def _rand_rgba(rng):
    vals = [int(v) for v in rng.randint(0, 256, size=3)]
    alpha = int(rng.choice([255, 255, 200, 128, 64, 0]))
    return (*vals, alpha)


def _rand_point(rng, meta):
    return (float(rng.uniform(0, meta.width)), float(rng.uniform(0, meta.height)))


def _rand_span(rng, duration):
    s = int(rng.randint(0, duration))
    e = int(rng.randint(s + 1, duration + 1))
    return s, e


def random_objects(rng, scene, duration, max_objects=6):
    """Valid random render objects covering every drawable kind."""
    meta = scene.meta
    eids = [s.entity_id for s in scene.spec.entities]
    kinds = [Kind.CIRCLE, Kind.SPOTLIGHT, Kind.PATH, Kind.ZONE, Kind.MARKER,
             Kind.BG_FILTER, Kind.ZOOM_IN, Kind.TEXT, Kind.CAPTION]
    if len(eids) >= 2:
        kinds.append(Kind.CONNECTOR)
    objects = []
    for i in range(int(rng.randint(0, max_objects + 1))):
        kind = kinds[int(rng.randint(0, len(kinds)))]
        span = _rand_span(rng, duration)
        ident = f"obj-{i}"
        if kind is Kind.CIRCLE:
            params = CircleParams(
                anchor_entity=str(rng.choice(eids)),
                radius=float(rng.uniform(0.4, 1.6)),
                stroke_color=_rand_rgba(rng),
                stroke_width=float(rng.uniform(1.0, 3.0)),
                fill_alpha=float(rng.uniform(0.0, 1.0)),
            )
        elif kind is Kind.SPOTLIGHT:
            params = SpotlightParams(
                anchor_entity=str(rng.choice(eids)),
                glow_color=_rand_rgba(rng),
                radius=float(rng.uniform(0.6, 2.0)),
                inner_alpha=float(rng.uniform(0.2, 1.0)),
                outer_alpha=float(rng.uniform(0.0, 0.2)),
            )
        elif kind is Kind.CONNECTOR:
            chosen = list(rng.choice(eids, size=2, replace=False))
            params = ConnectorParams(
                anchor_entities=tuple(str(e) for e in chosen),
                line_color=_rand_rgba(rng),
                line_width=float(rng.uniform(1.0, 3.0)),
                closed=bool(rng.randint(0, 2)),
            )
        elif kind is Kind.PATH:
            n_pts = int(rng.randint(2, 5))
            params = PathParams(
                points=tuple(_rand_point(rng, meta) for _ in range(n_pts)),
                color=_rand_rgba(rng),
                width=float(rng.uniform(1.0, 4.0)),
                arrow_head=bool(rng.randint(0, 2)),
                dashed=bool(rng.randint(0, 2)),
            )
        elif kind is Kind.ZONE:
            # a triangle is always a simple polygon
            while True:
                pts = tuple(_rand_point(rng, meta) for _ in range(3))
                area2 = abs(
                    (pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1])
                    - (pts[1][1] - pts[0][1]) * (pts[2][0] - pts[0][0])
                )
                if area2 > 1.0:
                    break
            params = ZoneParams(points=pts, fill_color=_rand_rgba(rng),
                                fill_alpha=float(rng.uniform(0.0, 1.0)))
        elif kind is Kind.MARKER:
            params = MarkerParams(
                symbol=MarkerSymbol(list(MarkerSymbol)[int(rng.randint(0, 3))]),
                position=_rand_point(rng, meta),
                color=_rand_rgba(rng),
                size=float(rng.uniform(4.0, 14.0)),
            )
        elif kind is Kind.BG_FILTER:
            params = BgFilterParams(
                filter_color=tuple(int(v) for v in rng.randint(0, 256, size=3)),
                alpha=float(rng.uniform(0.0, 1.0)),
                mode=FilterMode.GRAYSCALE if rng.randint(0, 2) else FilterMode.TINT,
            )
        elif kind is Kind.ZOOM_IN:
            if rng.randint(0, 2):
                target = Anchor(entity_id=str(rng.choice(eids)),
                                placement=Placement.WAIST)
            else:
                target = Anchor(point=_rand_point(rng, meta))
            params = ZoomInParams(target=target,
                                  factor=float(rng.uniform(1.0, 2.5)),
                                  ease_frames=int(rng.randint(0, 10)))
        elif kind is Kind.TEXT:
            placement = list(Placement)[int(rng.randint(0, 3))]
            if rng.randint(0, 2):
                target = Anchor(entity_id=str(rng.choice(eids)), placement=placement)
            else:
                target = Anchor(point=_rand_point(rng, meta))
            params = TextParams(
                content=str(rng.choice(["P1", "GO!", "SCORE", "X 9"])),
                target=target,
                placement=placement,
                font_px=int(rng.randint(8, 24)),
                color=_rand_rgba(rng),
                pill=bool(rng.randint(0, 2)),
            )
        else:  # Kind.CAPTION
            params = CaptionParams(
                content=str(rng.choice(["NICE PASS", "DEFENSE", "3PT"])),
                font_px=int(rng.randint(8, 20)),
                color=_rand_rgba(rng),
            )
        objects.append(_obj(ident, kind, span, params, z=int(rng.randint(-2, 3))))
    return objects


def random_project(seed, scene, max_objects=6):
    """Random valid project over the scene (asserted violation-free)."""
    rng = np.random.RandomState(seed)
    project = base_project(scene)
    duration = project.output_duration()
    project = with_objects(project, random_objects(rng, scene, duration, max_objects))
    if rng.randint(0, 2):
        s, e = _rand_span(rng, duration)
        project = replace(project, captions=(model.Caption("LIVE", s, e, 10),))
    violations = model.validate_project(project, scene.dataset())
    assert violations == [], violations
    return project


def write_assets(scene, root):
    """Write frames/, masks/, tracking.json under root; returns the refs."""
    frames_dir = os.path.join(root, "frames")
    masks_dir = os.path.join(root, "masks")
    os.makedirs(frames_dir, exist_ok=True)
    os.makedirs(masks_dir, exist_ok=True)
    from courtcanvas.ingest import dataset_to_canonical

    for n in range(scene.frame_count):
        Image.fromarray(scene.frame(n), mode="RGB").save(
            os.path.join(frames_dir, f"frame_{n:06d}.png"))
        Image.fromarray(scene.mask(n), mode="L").save(
            os.path.join(masks_dir, f"mask_{n:06d}.png"))
    with open(os.path.join(root, "tracking.json"), "wb") as f:
        f.write(dataset_to_canonical(scene.dataset()))
    return "frames", "tracking.json", "masks"


def authoring_scenario(scene):
    """The end-to-end authoring flow: spotlight a player, sketch a path,
    circle two players, freeze with a darkened background and two
    spotlights, add a "Score!" label, then narrative captions."""
    dataset = scene.dataset()
    eids = [s.entity_id for s in scene.spec.entities]
    assert len(eids) >= 5, "scenario needs five tracked players"
    fc = scene.meta.frame_count
    project = base_project(scene)

    freeze_at = fc // 2
    freeze_len = max(10, fc // 5)
    tl = tl_mod.insert_freeze(project.timeline, freeze_at, freeze_len)
    project = model.respan_asset_objects(replace(project, timeline=tl))
    duration = project.output_duration()
    f0, f1 = freeze_at, freeze_at + freeze_len

    w, h = scene.meta.width, scene.meta.height
    objects = [
        _obj("spot-1", Kind.SPOTLIGHT, (0, f0),
             SpotlightParams(anchor_entity=eids[0])),
        _obj("path-1", Kind.PATH, (fc // 8, duration),
             PathParams(points=((w * 0.2, h * 0.8), (w * 0.5, h * 0.6),
                                (w * 0.8, h * 0.85)))),
        _obj("circle-1", Kind.CIRCLE, (fc // 4, duration),
             CircleParams(anchor_entity=eids[1])),
        _obj("circle-2", Kind.CIRCLE, (fc // 4, duration),
             CircleParams(anchor_entity=eids[2])),
        _obj("freeze-1", Kind.FREEZE_FRAME, (f0, f1), model.FreezeFrameParams()),
        _obj("filter-1", Kind.BG_FILTER, (f0, f1),
             BgFilterParams(filter_color=(30, 30, 30), alpha=0.7)),
        _obj("spot-2", Kind.SPOTLIGHT, (f0, f1),
             SpotlightParams(anchor_entity=eids[1])),
        _obj("spot-3", Kind.SPOTLIGHT, (f0, f1),
             SpotlightParams(anchor_entity=eids[4])),
        _obj("text-1", Kind.TEXT, (f1, duration),
             TextParams(content="Score!",
                        target=Anchor(entity_id=eids[1], placement=Placement.HEAD),
                        placement=Placement.HEAD)),
    ]
    captions = [model.Caption(c.text, c.start_frame, c.end_frame, c.font_px, c.color)
                for c in synth.stub_captioner(dataset)]
    project = with_objects(project, objects, captions)
    violations = model.validate_project(project, dataset)
    assert violations == [], violations
    return project


@pytest.fixture(scope="session")
def scene():
    return make_scene(seed=3, n_entities=3)


@pytest.fixture(scope="session")
def dataset(scene):
    return scene.dataset()
