"""Command-line entry points: synthetic asset generation, headless export,
tracking conversion, the local HTTP service, and a latency benchmark."""

from __future__ import annotations

import json
import os
import statistics
import sys
import time
from fractions import Fraction

import click
import numpy as np
from PIL import Image

from . import export as export_mod, geometry, model, raster, synth
from .ingest import (
    SPORTS,
    AssetStore,
    IngestError,
    dataset_to_canonical,
    parse_tracking_mot_csv,
)
from .model import VideoMeta


def _fail(code: str, message: str) -> None:
    """Machine-readable single-line error, nonzero exit."""
    click.echo(json.dumps({"error": {"code": code, "message": message}}), err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Authoring engine for augmented sports-video highlights."""


# ---------------------------------------------------------------------------


@main.command("synth")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def synth_cmd(spec_path: str, seed: int, out_dir: str) -> None:
    """Generate a deterministic synthetic clip: video frames, mask frames,
    and a canonical tracking file."""
    try:
        with open(spec_path, "r", encoding="utf-8") as f:
            spec = synth.SceneSpec.from_doc(json.load(f))
        scene = synth.generate_scene(spec, seed)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        _fail("bad_spec", str(exc))
    frames_dir = os.path.join(out_dir, "frames")
    masks_dir = os.path.join(out_dir, "masks")
    os.makedirs(frames_dir, exist_ok=True)
    os.makedirs(masks_dir, exist_ok=True)
    for n in range(scene.frame_count):
        Image.fromarray(scene.frame(n), mode="RGB").save(
            os.path.join(frames_dir, f"frame_{n:06d}.png")
        )
        Image.fromarray(scene.mask(n), mode="L").save(
            os.path.join(masks_dir, f"mask_{n:06d}.png")
        )
    with open(os.path.join(out_dir, "tracking.json"), "wb") as f:
        f.write(dataset_to_canonical(scene.dataset()))
    click.echo(json.dumps({
        "frames": scene.frame_count,
        "video": frames_dir,
        "masks": masks_dir,
        "tracking": os.path.join(out_dir, "tracking.json"),
    }))


# ---------------------------------------------------------------------------


def _parse_range(text: str | None):
    if text is None:
        return None
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        _fail("bad_range", f"--range must be a:b, got {text!r}")


@main.command("export")
@click.option("--project", "project_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--assets", "assets_root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@click.option("--y4m", "y4m_path", default=None, type=click.Path(dir_okay=False))
@click.option("--srt", "srt_path", default=None, type=click.Path(dir_okay=False))
@click.option("--burn-in", is_flag=True, default=False)
@click.option("--range", "range_text", default=None, help="half-open output range a:b")
@click.option("--workers", default=None, type=int)
def export_cmd(project_path, assets_root, out_dir, y4m_path, srt_path,
               burn_in, range_text, workers) -> None:
    """Render a project deterministically to PNG frames and/or a y4m stream,
    with optional SRT sidecar captions."""
    frame_range = _parse_range(range_text)
    try:
        with open(project_path, "rb") as f:
            project = model.decode_project(f.read())
    except (OSError, model.ProjectDecodeError) as exc:
        _fail("bad_project", str(exc))
    if out_dir is None and y4m_path is None and srt_path is None:
        _fail("no_output", "need at least one of --out, --y4m, --srt")
    # captions go to the sidecar unless burn-in is explicitly requested
    burn = True if srt_path is None else burn_in
    assets = AssetStore(assets_root)
    manifests = {}
    try:
        if out_dir is not None:
            manifests["png"] = export_mod.export_frames(
                project, assets, out_dir, frame_range, workers, burn
            )
        if y4m_path is not None:
            manifests["y4m"] = export_mod.export_y4m(
                project, assets, y4m_path, frame_range, workers, burn
            )
        if srt_path is not None:
            with open(srt_path, "wb") as f:
                f.write(export_mod.export_srt(list(project.captions), project.meta.fps))
    except (export_mod.ExportError, IngestError, OSError) as exc:
        _fail("export_failed", str(exc))
    click.echo(json.dumps({
        key: {"digest": m["digest"], "frame_count": m["frame_count"]}
        for key, m in manifests.items()
    }))


# ---------------------------------------------------------------------------


@main.command("ingest")
@click.option("--mot", "mot_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--width", required=True, type=int)
@click.option("--height", required=True, type=int)
@click.option("--fps", default="30:1", show_default=True, help="num:den")
@click.option("--frames", "frame_count", required=True, type=int)
@click.option("--sport", default="basketball", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def ingest_cmd(mot_path, width, height, fps, frame_count, sport, out_path) -> None:
    """Convert MOT-style CSV tracking to the canonical tracking file."""
    try:
        if sport not in SPORTS:
            raise IngestError(f"unknown sport {sport!r} (one of {sorted(SPORTS)})")
        num, den = (int(v) for v in fps.split(":"))
        meta = VideoMeta(width, height, Fraction(num, den), frame_count)
        with open(mot_path, "rb") as f:
            dataset = parse_tracking_mot_csv(f.read(), meta)
        dataset.sport = sport
        data = dataset_to_canonical(dataset)
    except (OSError, ValueError, IngestError) as exc:
        _fail("ingest_failed", str(exc))
    with open(out_path, "wb") as f:
        f.write(data)
    click.echo(json.dumps({"entities": len(dataset.entities), "out": out_path}))


# ---------------------------------------------------------------------------


@main.command("serve")
@click.option("--port", default=8787, show_default=True, type=int)
@click.option("--data-root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--workers", default=0, show_default=True, type=int)
def serve_cmd(port: int, data_root: str, workers: int) -> None:
    """Run the local HTTP service."""
    import uvicorn

    from .service import create_app

    raster.warmup()
    uvicorn.run(create_app(data_root, workers=workers), host="127.0.0.1", port=port)


# ---------------------------------------------------------------------------


@main.command("bench")
@click.option("--width", default=1920, show_default=True, type=int)
@click.option("--height", default=1080, show_default=True, type=int)
@click.option("--frames", "frame_count", default=120, show_default=True, type=int)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def bench_cmd(width, height, frame_count, seed, out_dir) -> None:
    """Measure per-frame render latency on a synthetic clip; writes
    timings.csv and latency.png to the output directory."""
    from . import compositor

    spec = synth.SceneSpec(
        width=width,
        height=height,
        frame_count=frame_count,
        entities=(
            synth.EntityScript("1", (width * 0.2, height * 0.4), (0.5, 0.0),
                               (max(2, width // 24), max(4, height // 5))),
            synth.EntityScript("2", (width * 0.6, height * 0.5), (-0.4, 0.1),
                               (max(2, width // 24), max(4, height // 5))),
        ),
    )
    scene = synth.generate_scene(spec, seed)
    dataset = scene.dataset()
    homography = tuple(
        geometry.to_doc(geometry.default_ground_homography(width, height))
    )
    project = model.new_project("frames", "tracking.json", "masks",
                                scene.meta, homography)
    objects = list(project.objects)
    objects.append(model.RenderObject(
        "spot", model.Kind.SPOTLIGHT, 0, frame_count,
        model.DEFAULT_LAYER[model.Kind.SPOTLIGHT], 0,
        model.SpotlightParams(anchor_entity="1"),
    ))
    objects.append(model.RenderObject(
        "circ", model.Kind.CIRCLE, 0, frame_count,
        model.DEFAULT_LAYER[model.Kind.CIRCLE], 0,
        model.CircleParams(anchor_entity="2"),
    ))
    from dataclasses import replace as _replace
    project = _replace(project, objects=tuple(objects))

    raster.warmup()
    bg0, mask0 = scene.frame(0), scene.mask(0)
    plan0 = compositor.plan_frame(project, dataset, 0)
    compositor.render_frame(plan0, bg0, mask0)  # compile at full size

    timings = []
    for n in range(frame_count):
        bg, mask = scene.frame(n), scene.mask(n)
        plan = compositor.plan_frame(project, dataset, n)
        t0 = time.perf_counter()
        compositor.render_frame(plan, bg, mask)
        timings.append((n, (time.perf_counter() - t0) * 1000.0))

    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "timings.csv")
    with open(csv_path, "w", encoding="utf-8") as f:
        f.write("frame,render_ms\n")
        for n, ms in timings:
            f.write(f"{n},{ms:.4f}\n")

    values = [ms for _, ms in timings]
    median = statistics.median(values)
    p99 = float(np.percentile(values, 99))

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot([n for n, _ in timings], values, lw=0.8, label="render time")
    ax.axhline(median, color="tab:green", ls="--", label=f"median {median:.2f} ms")
    ax.axhline(p99, color="tab:red", ls=":", label=f"p99 {p99:.2f} ms")
    ax.set_xlabel("output frame")
    ax.set_ylabel("milliseconds")
    ax.set_title(f"per-frame render latency, {width}x{height}")
    ax.legend(loc="upper right")
    fig.tight_layout()
    png_path = os.path.join(out_dir, "latency.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)

    click.echo(json.dumps({
        "frames": frame_count,
        "median_ms": round(median, 4),
        "p99_ms": round(p99, 4),
        "timings": csv_path,
        "figure": png_path,
    }))


if __name__ == "__main__":
    main()
