"""Editing document controller: serializable commands, undo/redo/reset,
and project persistence.

Commands are small JSON-able values; every apply validates the resulting
project first, so a failing command leaves the session bit-identical.
Undo uses pre-image snapshots (projects are small immutable values), which
is uniformly correct for every command kind including parameter edits.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Optional

from . import model, timeline as tl_mod
from .ingest import TrackingDataset
from .model import Project

DEFAULT_FREEZE_FRAMES = 60  # new freezes, resizable afterwards

SESSION_SCHEMA_VERSION = 1


class CommandKind(str, Enum):
    ADD_OBJECT = "add_object"
    REMOVE_OBJECT = "remove_object"
    MOVE_RESIZE_OBJECT = "move_resize_object"
    SET_PARAMS = "set_params"
    ADD_CAPTION = "add_caption"
    EDIT_CAPTION = "edit_caption"
    REMOVE_CAPTION = "remove_caption"
    SPLIT_AT = "split_at"
    INSERT_FREEZE = "insert_freeze"
    SET_SPEED = "set_speed"
    SET_MUTED = "set_muted"
    DUPLICATE_SEGMENT = "duplicate_segment"
    SET_HOMOGRAPHY = "set_homography"


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    payload: dict
    id: int = -1  # assigned monotonically by the session at apply time

    def to_doc(self) -> dict:
        return {"id": self.id, "kind": self.kind.value, "payload": self.payload}

    @staticmethod
    def from_doc(d: dict) -> "Command":
        return Command(CommandKind(d["kind"]), dict(d["payload"]), int(d["id"]))


class SessionError(ValueError):
    def __init__(self, message: str, violations: Optional[list[str]] = None):
        super().__init__(message)
        self.violations = violations if violations is not None else [message]


class SessionLoadError(ValueError):
    pass


def _find_object(project: Project, object_id: str) -> int:
    for i, o in enumerate(project.objects):
        if o.id == object_id:
            return i
    raise SessionError(f"unknown object id {object_id!r}")


def _payload_int(payload: dict, key: str) -> int:
    try:
        return int(payload[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise SessionError(f"payload.{key}: missing or not an int") from exc


def execute_command(project: Project, cmd: Command) -> Project:
    """Pure command application; raises SessionError on bad payloads."""
    p = cmd.payload
    kind = cmd.kind
    if kind is CommandKind.ADD_OBJECT:
        try:
            obj = model.object_from_doc(p["object"], "payload.object")
        except (KeyError, model.ProjectDecodeError) as exc:
            raise SessionError(f"payload.object: {exc}") from exc
        if any(o.id == obj.id for o in project.objects):
            raise SessionError(f"object id {obj.id!r} already exists")
        return replace(project, objects=project.objects + (obj,))
    if kind is CommandKind.REMOVE_OBJECT:
        i = _find_object(project, str(p.get("id")))
        obj = project.objects[i]
        if obj.kind in (model.Kind.BACKGROUND, model.Kind.FOREGROUND):
            raise SessionError(f"cannot remove the {obj.kind.value} object")
        return replace(
            project, objects=project.objects[:i] + project.objects[i + 1 :]
        )
    if kind is CommandKind.MOVE_RESIZE_OBJECT:
        i = _find_object(project, str(p.get("id")))
        objs = list(project.objects)
        objs[i] = replace(
            objs[i],
            start_frame=_payload_int(p, "start_frame"),
            end_frame=_payload_int(p, "end_frame"),
        )
        return replace(project, objects=tuple(objs))
    if kind is CommandKind.SET_PARAMS:
        i = _find_object(project, str(p.get("id")))
        objs = list(project.objects)
        try:
            params = model._params_from_doc(
                objs[i].kind, p.get("params", {}), "payload.params"
            )
        except model.ProjectDecodeError as exc:
            raise SessionError(str(exc)) from exc
        objs[i] = replace(objs[i], params=params)
        return replace(project, objects=tuple(objs))
    if kind is CommandKind.ADD_CAPTION:
        try:
            cap = model.caption_from_doc(p["caption"], "payload.caption")
        except (KeyError, model.ProjectDecodeError) as exc:
            raise SessionError(f"payload.caption: {exc}") from exc
        return replace(project, captions=project.captions + (cap,))
    if kind is CommandKind.EDIT_CAPTION:
        i = _payload_int(p, "index")
        if not 0 <= i < len(project.captions):
            raise SessionError(f"caption index {i} out of range")
        try:
            cap = model.caption_from_doc(p["caption"], "payload.caption")
        except (KeyError, model.ProjectDecodeError) as exc:
            raise SessionError(f"payload.caption: {exc}") from exc
        caps = list(project.captions)
        caps[i] = cap
        return replace(project, captions=tuple(caps))
    if kind is CommandKind.REMOVE_CAPTION:
        i = _payload_int(p, "index")
        if not 0 <= i < len(project.captions):
            raise SessionError(f"caption index {i} out of range")
        caps = list(project.captions)
        del caps[i]
        return replace(project, captions=tuple(caps))

    try:
        if kind is CommandKind.SPLIT_AT:
            tl = tl_mod.split_at(project.timeline, _payload_int(p, "frame"))
        elif kind is CommandKind.INSERT_FREEZE:
            frame = _payload_int(p, "frame")
            duration = int(p.get("duration", DEFAULT_FREEZE_FRAMES))
            tl = tl_mod.insert_freeze(project.timeline, frame, duration)
            marker = model.RenderObject(
                id=f"freeze-{cmd.id}",
                kind=model.Kind.FREEZE_FRAME,
                start_frame=frame,
                end_frame=frame + duration,
                layer=model.DEFAULT_LAYER[model.Kind.FREEZE_FRAME],
                z=0,
                params=model.FreezeFrameParams(),
            )
            project = replace(project, objects=project.objects + (marker,))
        elif kind is CommandKind.SET_SPEED:
            speed = p.get("speed")
            if not (isinstance(speed, list) and len(speed) == 2):
                raise SessionError("payload.speed: expected [numerator, denominator]")
            tl = tl_mod.set_speed(
                project.timeline,
                _payload_int(p, "segment_index"),
                Fraction(int(speed[0]), int(speed[1])),
            )
        elif kind is CommandKind.SET_MUTED:
            tl = tl_mod.set_muted(
                project.timeline, _payload_int(p, "segment_index"), bool(p.get("muted"))
            )
        elif kind is CommandKind.DUPLICATE_SEGMENT:
            tl = tl_mod.duplicate_segment(
                project.timeline, _payload_int(p, "segment_index")
            )
        elif kind is CommandKind.SET_HOMOGRAPHY:
            h = p.get("homography")
            if not (isinstance(h, list) and len(h) == 9):
                raise SessionError("payload.homography: expected 9 row-major reals")
            return replace(project, homography=tuple(float(v) for v in h))
        else:
            raise SessionError(f"unknown command kind {kind}")
    except (tl_mod.TimelineError, ZeroDivisionError) as exc:
        raise SessionError(str(exc)) from exc
    return model.respan_asset_objects(replace(project, timeline=tl))


class Session:
    """Single-writer editing session over one project."""

    def __init__(self, project: Project, dataset: Optional[TrackingDataset] = None):
        violations = model.validate_project(project, dataset)
        if violations:
            raise SessionError("invalid baseline project", violations)
        self.baseline = project
        self.project = project
        self.dataset = dataset
        self._next_id = 0
        self.undo_stack: list[tuple[Command, Project]] = []  # (cmd, state before)
        self.redo_stack: list[tuple[Command, Project]] = []  # (cmd, state after)

    def apply_command(self, cmd: Command) -> Command:
        """Validate and apply; returns the command with its assigned id.
        On failure the session is unchanged and SessionError carries the
        violation list."""
        stamped = replace(cmd, id=self._next_id)
        new_project = execute_command(self.project, stamped)
        violations = model.validate_project(new_project, self.dataset)
        if violations:
            raise SessionError("command produces an invalid project", violations)
        self.undo_stack.append((stamped, self.project))
        self.redo_stack.clear()
        self.project = new_project
        self._next_id += 1
        return stamped

    def undo(self) -> bool:
        if not self.undo_stack:
            return False
        cmd, before = self.undo_stack.pop()
        self.redo_stack.append((cmd, self.project))
        self.project = before
        return True

    def redo(self) -> bool:
        if not self.redo_stack:
            return False
        cmd, after = self.redo_stack.pop()
        self.undo_stack.append((cmd, self.project))
        self.project = after
        return True

    def reset(self) -> None:
        self.project = self.baseline
        self.undo_stack.clear()
        self.redo_stack.clear()

    # -- persistence --------------------------------------------------------

    def save(self, path: str) -> None:
        applied = [cmd.to_doc() for cmd, _ in self.undo_stack]
        undone = [cmd.to_doc() for cmd, _ in reversed(self.redo_stack)]
        doc = {
            "schema_version": SESSION_SCHEMA_VERSION,
            "baseline": model.project_to_doc(self.baseline),
            "command_log": applied + undone,
            "undone_count": len(undone),
            "next_command_id": self._next_id,
        }
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(doc, f, ensure_ascii=False)
        os.replace(tmp, path)

    @staticmethod
    def load(path: str, dataset: Optional[TrackingDataset] = None) -> "Session":
        try:
            with open(path, "r", encoding="utf-8") as f:
                doc = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise SessionLoadError(f"cannot read session file: {exc}") from exc
        if doc.get("schema_version") != SESSION_SCHEMA_VERSION:
            raise SessionLoadError(
                f"unsupported session schema_version {doc.get('schema_version')}"
            )
        try:
            baseline = model.project_from_doc(doc["baseline"])
        except (KeyError, model.ProjectDecodeError) as exc:
            raise SessionLoadError(f"baseline: {exc}") from exc
        session = Session(baseline, dataset)
        log = doc.get("command_log", [])
        for entry in log:
            try:
                cmd = Command.from_doc(entry)
            except (KeyError, TypeError, ValueError) as exc:
                raise SessionLoadError(
                    f"command {entry.get('id', '?')}: malformed ({exc})"
                ) from exc
            try:
                session.apply_command(Command(cmd.kind, cmd.payload))
            except SessionError as exc:
                raise SessionLoadError(f"command {cmd.id}: replay failed ({exc})") from exc
        undone = int(doc.get("undone_count", 0))
        if not 0 <= undone <= len(log):
            raise SessionLoadError(f"undone_count {undone} inconsistent with log")
        for _ in range(undone):
            session.undo()
        return session


def replay(baseline: Project, commands: list[Command],
           dataset: Optional[TrackingDataset] = None) -> Project:
    """Replay oracle: fold a command log over the baseline."""
    project = baseline
    for cmd in commands:
        project = execute_command(project, cmd)
        violations = model.validate_project(project, dataset)
        if violations:
            raise SessionError(f"replay: command {cmd.id} invalid", violations)
    return project
