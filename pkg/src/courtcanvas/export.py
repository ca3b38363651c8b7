"""Headless deterministic export: PNG frame sequences, a raw YUV4MPEG2
stream for external encoders, and SRT sidecar subtitles.

Frames render in parallel but commit to disk strictly in index order, so
the manifest and whole-run digest are identical across worker counts.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import io
import json
import os
from dataclasses import replace
from fractions import Fraction
from typing import Optional

import numpy as np
from PIL import Image

from . import compositor, timeline as tl_mod
from .ingest import AssetStore, FrameSource, TrackingDataset, interpolate_dataset, load_mask_frame, load_video_frame
from .model import Caption, Project, validate_project

MANIFEST_SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"


class ExportError(ValueError):
    pass


def encode_png(frame: np.ndarray) -> bytes:
    """Deterministic PNG bytes for an (h, w, 3) uint8 frame.

    Shared by export and the preview endpoint so the two are byte-equal.
    """
    buf = io.BytesIO()
    Image.fromarray(frame, mode="RGB").save(buf, format="PNG", compress_level=6)
    return buf.getvalue()


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


class RenderContext:
    """Resolved assets plus the interpolated tracking dataset for a project."""

    def __init__(self, project: Project, video: FrameSource,
                 masks: FrameSource, dataset: TrackingDataset):
        self.project = project
        self.video = video
        self.masks = masks
        self.dataset = interpolate_dataset(dataset)

    @staticmethod
    def open(project: Project, assets: AssetStore) -> "RenderContext":
        video = assets.video(project.video_ref)
        masks = assets.masks(project.mask_ref)
        dataset = assets.tracking(project.tracking_ref)
        return RenderContext(project, video, masks, dataset)

    def render(self, n: int, burn_in: bool = True) -> np.ndarray:
        plan = compositor.plan_frame(self.project, self.dataset, n)
        if not burn_in:
            plan = replace(plan, captions=())
        bg = load_video_frame(self.video, plan.source.source_frame)
        mask = load_mask_frame(self.masks, plan.source.source_frame)
        return compositor.render_frame(plan, bg, mask)


def _check_range(project: Project, frame_range) -> tuple[int, int]:
    duration = project.output_duration()
    if frame_range is None:
        return 0, duration
    a, b = int(frame_range[0]), int(frame_range[1])
    if not (0 <= a <= b <= duration):
        raise ExportError(f"range [{a}, {b}) outside output duration {duration}")
    return a, b


def _preflight(project: Project, assets: AssetStore) -> RenderContext:
    violations = validate_project(project)
    if violations:
        raise ExportError("invalid project: " + "; ".join(violations))
    ctx = RenderContext.open(project, assets)
    more = validate_project(project, ctx.dataset)
    if more:
        raise ExportError("invalid project: " + "; ".join(more))
    return ctx


def _worker_count(project: Project, workers: Optional[int]) -> int:
    if workers is None:
        workers = project.export.workers
    if workers <= 0:
        workers = os.cpu_count() or 1
    return max(1, workers)


def _base_manifest(project: Project, a: int, b: int) -> dict:
    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "width": project.meta.width,
        "height": project.meta.height,
        "fps": [project.meta.fps.numerator, project.meta.fps.denominator],
        "range": [a, b],
        "frame_count": b - a,
        "muted_ranges": [list(r) for r in tl_mod.muted_ranges(project.timeline)],
    }


def _write_manifest(out_dir: str, manifest: dict) -> None:
    tmp = os.path.join(out_dir, MANIFEST_NAME + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    os.replace(tmp, os.path.join(out_dir, MANIFEST_NAME))


def export_frames(
    project: Project,
    assets: AssetStore,
    out_dir: str,
    frame_range: Optional[tuple[int, int]] = None,
    workers: Optional[int] = None,
    burn_in: Optional[bool] = None,
    progress=None,
) -> dict:
    """Render output frames [a, b) to out_dir/frame_%06d.png plus a manifest.

    Frames render on a thread pool; files are committed in index order by a
    single writer, and the manifest is written last via atomic rename.
    `progress`, when given, is called with the running count of frames done.
    """
    ctx = _preflight(project, assets)
    a, b = _check_range(project, frame_range)
    if burn_in is None:
        burn_in = project.export.burn_in
    os.makedirs(out_dir, exist_ok=True)

    frames_meta: list[dict] = []
    run = hashlib.sha256()
    pool_size = _worker_count(project, workers)
    with concurrent.futures.ThreadPoolExecutor(max_workers=pool_size) as pool:
        encoded = pool.map(
            lambda n: encode_png(ctx.render(n, burn_in)), range(a, b)
        )
        for n, png in zip(range(a, b), encoded):
            name = f"frame_{n:06d}.png"
            with open(os.path.join(out_dir, name), "wb") as f:
                f.write(png)
            digest = _digest(png)
            run.update(digest.encode("ascii"))
            frames_meta.append({"index": n, "file": name, "digest": digest})
            if progress is not None:
                progress(len(frames_meta))

    manifest = _base_manifest(project, a, b)
    manifest["format"] = "png"
    manifest["frames"] = frames_meta
    manifest["digest"] = "sha256:" + run.hexdigest()
    _write_manifest(out_dir, manifest)
    return manifest


# ---------------------------------------------------------------------------
# YUV4MPEG2


def rgb_to_yuv420(frame: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """BT.601 full-range RGB -> planar 4:2:0, round-half-up everywhere."""
    h, w = frame.shape[0], frame.shape[1]
    if h % 2 or w % 2:
        raise ExportError(f"4:2:0 needs even dimensions, got {w}x{h}")
    r = frame[:, :, 0].astype(np.float64)
    g = frame[:, :, 1].astype(np.float64)
    b = frame[:, :, 2].astype(np.float64)
    y = np.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5)
    cb = 128.0 + (-0.168736 * r - 0.331264 * g + 0.5 * b)
    cr = 128.0 + (0.5 * r - 0.418688 * g - 0.081312 * b)
    # average each 2x2 block before quantizing (co-sited with the block)
    cb = np.floor((cb[0::2, 0::2] + cb[0::2, 1::2] + cb[1::2, 0::2] + cb[1::2, 1::2]) / 4.0 + 0.5)
    cr = np.floor((cr[0::2, 0::2] + cr[0::2, 1::2] + cr[1::2, 0::2] + cr[1::2, 1::2]) / 4.0 + 0.5)
    clip = lambda p: np.clip(p, 0, 255).astype(np.uint8)
    return clip(y), clip(cb), clip(cr)


def y4m_header(width: int, height: int, fps: Fraction) -> bytes:
    return (
        f"YUV4MPEG2 W{width} H{height} "
        f"F{fps.numerator}:{fps.denominator} Ip A1:1 C420jpeg\n"
    ).encode("ascii")


def export_y4m(
    project: Project,
    assets: AssetStore,
    out_path: str,
    frame_range: Optional[tuple[int, int]] = None,
    workers: Optional[int] = None,
    burn_in: Optional[bool] = None,
    progress=None,
) -> dict:
    """Write the output range as an uncompressed YUV4MPEG2 stream."""
    ctx = _preflight(project, assets)
    a, b = _check_range(project, frame_range)
    if burn_in is None:
        burn_in = project.export.burn_in
    if project.meta.width % 2 or project.meta.height % 2:
        raise ExportError(
            f"4:2:0 needs even dimensions, got {project.meta.width}x{project.meta.height}"
        )

    def frame_payload(n: int) -> bytes:
        y, cb, cr = rgb_to_yuv420(ctx.render(n, burn_in))
        return b"FRAME\n" + y.tobytes() + cb.tobytes() + cr.tobytes()

    run = hashlib.sha256()
    done = 0
    pool_size = _worker_count(project, workers)
    tmp = out_path + ".tmp"
    with open(tmp, "wb") as f:
        header = y4m_header(project.meta.width, project.meta.height, project.meta.fps)
        f.write(header)
        run.update(header)
        with concurrent.futures.ThreadPoolExecutor(max_workers=pool_size) as pool:
            for payload in pool.map(frame_payload, range(a, b)):
                f.write(payload)
                run.update(payload)
                done += 1
                if progress is not None:
                    progress(done)
    os.replace(tmp, out_path)

    manifest = _base_manifest(project, a, b)
    manifest["format"] = "y4m"
    manifest["file"] = os.path.basename(out_path)
    manifest["digest"] = "sha256:" + run.hexdigest()
    return manifest


# ---------------------------------------------------------------------------
# SRT sidecar


def _srt_timestamp(frame: int, fps: Fraction) -> str:
    ms = frame * 1000 * fps.denominator // fps.numerator
    s, ms = divmod(ms, 1000)
    m, s = divmod(s, 60)
    h, m = divmod(m, 60)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def export_srt(captions: list[Caption], fps: Fraction) -> bytes:
    ordered = sorted(captions, key=lambda c: (c.start_frame, c.end_frame))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start_frame < prev.end_frame:
            raise ExportError(
                f"captions overlap: [{prev.start_frame}, {prev.end_frame}) and "
                f"[{cur.start_frame}, {cur.end_frame})"
            )
    lines: list[str] = []
    for i, cap in enumerate(ordered, start=1):
        lines.append(str(i))
        lines.append(
            f"{_srt_timestamp(cap.start_frame, fps)} --> "
            f"{_srt_timestamp(cap.end_frame, fps)}"
        )
        lines.append(cap.text)
        lines.append("")
    return "\n".join(lines).encode("utf-8")
