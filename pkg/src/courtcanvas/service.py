"""Local HTTP facade over the editing session and compositor.

Every endpoint delegates to the in-process engine, so responses are byte-
or structure-equal to the corresponding library calls.  Mutations on a
project are serialized by a per-project lock; previews render concurrently
from the latest immutable project snapshot; exports run on a background
worker pool with an in-process job table.
"""

from __future__ import annotations

import itertools
import os
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import compositor, export as export_mod, geometry, model
from .ingest import AssetStore, IngestError, load_mask_frame, load_video_frame
from .session import Command, CommandKind, Session, SessionError


def _error(status: int, code: str, message: str,
           violations: Optional[list[str]] = None) -> JSONResponse:
    body: dict[str, Any] = {"error": {"code": code, "message": message}}
    if violations is not None:
        body["error"]["violations"] = violations
    return JSONResponse(status_code=status, content=body)


class ProjectState:
    def __init__(self, session: Session, ctx: export_mod.RenderContext):
        self.session = session
        self.ctx = ctx
        self.lock = threading.Lock()
        self.version = 0


class ExportJob:
    def __init__(self, job_id: str, total: int):
        self.job_id = job_id
        self.total = total
        self.state = "queued"
        self.frames_done = 0
        self.manifest: Optional[dict] = None
        self.message: Optional[str] = None
        self.lock = threading.Lock()

    def snapshot(self) -> dict:
        with self.lock:
            doc: dict[str, Any] = {
                "job_id": self.job_id,
                "state": self.state,
                "progress": {"frames_done": self.frames_done, "total": self.total},
            }
            if self.manifest is not None:
                doc["manifest"] = self.manifest
            if self.message is not None:
                doc["message"] = self.message
            return doc


def create_app(data_root: str, export_root: Optional[str] = None,
               workers: int = 0) -> FastAPI:
    app = FastAPI(title="courtcanvas", docs_url=None, redoc_url=None)
    assets = AssetStore(data_root)
    if export_root is None:
        export_root = os.path.join(tempfile.gettempdir(), "courtcanvas-exports")
    projects: dict[str, ProjectState] = {}
    jobs: dict[str, ExportJob] = {}
    table_lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=max(1, workers or (os.cpu_count() or 1)))
    ids = itertools.count(1)

    def get_state(project_id: str) -> Optional[ProjectState]:
        with table_lock:
            return projects.get(project_id)

    def summary(state: ProjectState) -> dict:
        p = state.session.project
        return {
            "version": state.version,
            "output_duration": p.output_duration(),
            "objects": [{"id": o.id, "kind": o.kind.value} for o in p.objects],
            "captions": len(p.captions),
            "segments": len(p.timeline.segments),
            "can_undo": bool(state.session.undo_stack),
            "can_redo": bool(state.session.redo_stack),
        }

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(422, "invalid_body", "request body must be JSON")
        if not isinstance(body, dict):
            return _error(422, "invalid_body", "request body must be a JSON object")
        try:
            if "project" in body:
                project = model.project_from_doc(body["project"])
            else:
                refs = {}
                for key in ("video_ref", "tracking_ref", "mask_ref"):
                    if not isinstance(body.get(key), str):
                        return _error(422, "invalid_body", f"{key}: missing or not a string")
                    refs[key] = body[key]
                dataset = assets.tracking(refs["tracking_ref"])
                meta = dataset.meta
                homography = tuple(
                    geometry.to_doc(
                        geometry.default_ground_homography(meta.width, meta.height)
                    )
                )
                project = model.new_project(
                    refs["video_ref"], refs["tracking_ref"], refs["mask_ref"],
                    meta, homography,
                )
        except model.ProjectDecodeError as exc:
            return _error(422, "invalid_project", str(exc))
        except IngestError as exc:
            return _error(404, "unknown_asset", str(exc))
        try:
            ctx = export_mod.RenderContext.open(project, assets)
        except IngestError as exc:
            return _error(404, "unknown_asset", str(exc))
        try:
            session = Session(project, ctx.dataset)
        except SessionError as exc:
            return _error(422, "invalid_project", str(exc), exc.violations)
        project_id = uuid.uuid3(uuid.NAMESPACE_URL, f"courtcanvas/{next(ids)}").hex
        with table_lock:
            projects[project_id] = ProjectState(session, ctx)
        return JSONResponse(status_code=201, content={"project_id": project_id})

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        state = get_state(project_id)
        if state is None:
            return _error(404, "unknown_project", f"no project {project_id!r}")
        return model.project_to_doc(state.session.project)

    @app.post("/projects/{project_id}/commands")
    async def post_command(project_id: str, request: Request):
        state = get_state(project_id)
        if state is None:
            return _error(404, "unknown_project", f"no project {project_id!r}")
        try:
            body = await request.json()
        except Exception:
            return _error(422, "invalid_body", "request body must be JSON")
        try:
            kind = CommandKind(body["kind"])
            payload = body.get("payload", {})
            if not isinstance(payload, dict):
                raise TypeError("payload must be an object")
        except (KeyError, TypeError, ValueError) as exc:
            return _error(422, "invalid_body", f"malformed command: {exc}")
        with state.lock:
            try:
                stamped = state.session.apply_command(Command(kind, payload))
            except SessionError as exc:
                return _error(409, "rejected_command", str(exc), exc.violations)
            state.version += 1
            out = summary(state)
        out["command_id"] = stamped.id
        return out

    def _stack_op(project_id: str, op: str):
        state = get_state(project_id)
        if state is None:
            return _error(404, "unknown_project", f"no project {project_id!r}")
        with state.lock:
            changed = getattr(state.session, op)()
            if op != "reset" and not changed:
                return _error(409, "nothing_to_" + op, f"no command to {op}")
            state.version += 1
            return summary(state)

    @app.post("/projects/{project_id}/undo")
    def post_undo(project_id: str):
        return _stack_op(project_id, "undo")

    @app.post("/projects/{project_id}/redo")
    def post_redo(project_id: str):
        return _stack_op(project_id, "redo")

    @app.post("/projects/{project_id}/reset")
    def post_reset(project_id: str):
        return _stack_op(project_id, "reset")

    @app.get("/projects/{project_id}/frames/{n}")
    def get_frame(project_id: str, n: int):
        state = get_state(project_id)
        if state is None:
            return _error(404, "unknown_project", f"no project {project_id!r}")
        project = state.session.project
        if not 0 <= n < project.output_duration():
            return _error(416, "frame_out_of_range",
                          f"frame {n} outside [0, {project.output_duration()})")
        ctx = state.ctx
        plan = compositor.plan_frame(project, ctx.dataset, n)
        bg = load_video_frame(ctx.video, plan.source.source_frame)
        mask = load_mask_frame(ctx.masks, plan.source.source_frame)
        png = export_mod.encode_png(compositor.render_frame(plan, bg, mask))
        return Response(content=png, media_type="image/png")

    @app.get("/projects/{project_id}/hittest")
    def get_hittest(project_id: str, frame: int, x: float, y: float):
        state = get_state(project_id)
        if state is None:
            return _error(404, "unknown_project", f"no project {project_id!r}")
        project = state.session.project
        if not 0 <= frame < project.output_duration():
            return _error(416, "frame_out_of_range",
                          f"frame {frame} outside [0, {project.output_duration()})")
        entity = compositor.hit_test(project, state.ctx.dataset, frame, (x, y))
        return {"entity_id": entity}

    @app.post("/projects/{project_id}/exports", status_code=201)
    def post_export(project_id: str):
        state = get_state(project_id)
        if state is None:
            return _error(404, "unknown_project", f"no project {project_id!r}")
        with state.lock:
            project = state.session.project
        job = ExportJob(uuid.uuid4().hex, project.output_duration())
        with table_lock:
            jobs[job.job_id] = job

        def run():
            with job.lock:
                job.state = "running"

            def progress(done: int):
                with job.lock:
                    job.frames_done = done

            out_dir = os.path.join(export_root, project_id, job.job_id)
            try:
                manifest = export_mod.export_frames(
                    project, assets, out_dir, progress=progress
                )
            except (export_mod.ExportError, IngestError, OSError) as exc:
                with job.lock:
                    job.state = "failed"
                    job.message = str(exc)
                return
            with job.lock:
                job.manifest = manifest
                job.state = "done"

        pool.submit(run)
        return JSONResponse(status_code=201, content={"job_id": job.job_id})

    @app.get("/exports/{job_id}")
    def get_export(job_id: str):
        with table_lock:
            job = jobs.get(job_id)
        if job is None:
            return _error(404, "unknown_job", f"no export job {job_id!r}")
        return job.snapshot()

    return app
