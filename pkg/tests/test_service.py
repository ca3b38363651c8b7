import hashlib
import os
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from courtcanvas import compositor, export, ingest, model
from courtcanvas.service import create_app
from courtcanvas.session import Command, Session

from conftest import base_project, make_scene, write_assets
from test_session import add_circle, apply_random_commands


@pytest.fixture()
def service(tmp_path):
    scene = make_scene(seed=5, n_entities=3, frame_count=20)
    write_assets(scene, str(tmp_path / "data"))
    app = create_app(str(tmp_path / "data"),
                     export_root=str(tmp_path / "exports"), workers=2)
    with TestClient(app) as client:
        yield scene, client, tmp_path


def create(client, project=None):
    if project is None:
        body = {"video_ref": "frames", "tracking_ref": "tracking.json",
                "mask_ref": "masks"}
    else:
        body = {"project": model.project_to_doc(project)}
    r = client.post("/projects", json=body)
    assert r.status_code == 201, r.text
    return r.json()["project_id"]


def test_create_and_fetch_project(service):
    scene, client, _ = service
    pid = create(client)
    r = client.get(f"/projects/{pid}")
    assert r.status_code == 200
    doc = r.json()
    assert doc["video_ref"] == "frames"
    assert model.project_from_doc(doc).output_duration() == scene.meta.frame_count


def test_create_from_full_document(service):
    scene, client, _ = service
    pid = create(client, base_project(scene))
    assert client.get(f"/projects/{pid}").status_code == 200


def test_create_unknown_asset_404(service):
    _, client, _ = service
    r = client.post("/projects", json={"video_ref": "nope",
                                       "tracking_ref": "tracking.json",
                                       "mask_ref": "masks"})
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "unknown_asset"


def test_create_invalid_body_422(service):
    _, client, _ = service
    assert client.post("/projects", json={"video_ref": 5}).status_code == 422


def test_unknown_project_404(service):
    _, client, _ = service
    for r in (client.get("/projects/zz"),
              client.post("/projects/zz/commands", json={"kind": "split_at"}),
              client.post("/projects/zz/undo"),
              client.get("/projects/zz/frames/0")):
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "unknown_project"


def test_command_applies_and_summarizes(service):
    _, client, _ = service
    pid = create(client)
    cmd = add_circle("c1", (0, 10))
    r = client.post(f"/projects/{pid}/commands",
                    json={"kind": cmd.kind.value, "payload": cmd.payload})
    assert r.status_code == 200
    body = r.json()
    assert body["version"] == 1 and body["can_undo"] and not body["can_redo"]
    assert {"id": "c1", "kind": "circle"} in body["objects"]
    assert body["command_id"] == 0


def test_rejected_command_409_with_violations(service):
    _, client, _ = service
    pid = create(client)
    cmd = add_circle("c1", (0, 10), entity="404")
    r = client.post(f"/projects/{pid}/commands",
                    json={"kind": cmd.kind.value, "payload": cmd.payload})
    assert r.status_code == 409
    err = r.json()["error"]
    assert err["code"] == "rejected_command" and err["violations"]
    # project unchanged
    assert client.get(f"/projects/{pid}").json()["objects"] == [
        o for o in client.get(f"/projects/{pid}").json()["objects"]]
    assert len(client.get(f"/projects/{pid}").json()["objects"]) == 2


def test_malformed_command_422(service):
    _, client, _ = service
    pid = create(client)
    assert client.post(f"/projects/{pid}/commands",
                       json={"kind": "warp_time"}).status_code == 422


def test_undo_redo_reset_endpoints(service):
    _, client, _ = service
    pid = create(client)
    assert client.post(f"/projects/{pid}/undo").status_code == 409
    assert client.post(f"/projects/{pid}/redo").status_code == 409
    cmd = add_circle()
    client.post(f"/projects/{pid}/commands",
                json={"kind": cmd.kind.value, "payload": cmd.payload})
    assert client.post(f"/projects/{pid}/undo").json()["can_redo"]
    assert client.post(f"/projects/{pid}/redo").json()["can_undo"]
    assert client.post(f"/projects/{pid}/reset").status_code == 200
    assert client.post(f"/projects/{pid}/undo").status_code == 409


def test_twenty_commands_then_twenty_undos_restores_baseline(service):
    scene, client, _ = service
    pid = create(client)
    baseline = client.get(f"/projects/{pid}").json()

    shadow = Session(model.project_from_doc(baseline),
                     ingest.interpolate_dataset(scene.dataset()))
    rng = np.random.RandomState(44)
    applied = apply_random_commands(shadow, rng, 20)
    assert len(applied) == 20
    for cmd in applied:
        r = client.post(f"/projects/{pid}/commands",
                        json={"kind": cmd.kind.value, "payload": cmd.payload})
        assert r.status_code == 200, r.text
    # service state equals the in-process session after the same commands
    assert model.project_from_doc(client.get(f"/projects/{pid}").json()) \
        == shadow.project
    for _ in range(20):
        assert client.post(f"/projects/{pid}/undo").status_code == 200
    assert client.get(f"/projects/{pid}").json() == baseline
    assert client.post(f"/projects/{pid}/undo").status_code == 409


def test_frame_bytes_equal_in_process_render(service, tmp_path):
    scene, client, _ = service
    pid = create(client)
    project = model.project_from_doc(client.get(f"/projects/{pid}").json())
    assets = ingest.AssetStore(str(tmp_path / "data"))
    ctx = export.RenderContext.open(project, assets)
    for n in (0, 7, scene.meta.frame_count - 1):
        r = client.get(f"/projects/{pid}/frames/{n}")
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        assert r.content == export.encode_png(ctx.render(n))


def test_frame_out_of_range_416(service):
    scene, client, _ = service
    pid = create(client)
    r = client.get(f"/projects/{pid}/frames/{scene.meta.frame_count}")
    assert r.status_code == 416
    assert r.json()["error"]["code"] == "frame_out_of_range"


def test_hittest_endpoint(service, tmp_path):
    scene, client, _ = service
    pid = create(client)
    cmd = add_circle("c1", (0, 10), entity="1")
    client.post(f"/projects/{pid}/commands",
                json={"kind": cmd.kind.value, "payload": cmd.payload})
    project = model.project_from_doc(client.get(f"/projects/{pid}").json())
    dataset = ingest.interpolate_dataset(scene.dataset())
    # probe a grid; the service must agree with the library everywhere
    hits = 0
    for x in range(0, scene.meta.width, 8):
        for y in range(0, scene.meta.height, 6):
            want = compositor.hit_test(project, dataset, 3, (x + 0.5, y + 0.5))
            got = client.get(f"/projects/{pid}/hittest",
                             params={"frame": 3, "x": x + 0.5, "y": y + 0.5})
            assert got.json()["entity_id"] == want
            hits += want is not None
    assert client.get(f"/projects/{pid}/hittest",
                      params={"frame": 99, "x": 0, "y": 0}).status_code == 416


def wait_for_job(client, job_id, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        doc = client.get(f"/exports/{job_id}").json()
        if doc["state"] in ("done", "failed"):
            return doc
        time.sleep(0.02)
    raise AssertionError("export job did not finish")


def test_export_job_runs_to_completion(service):
    scene, client, tmp_path = service
    pid = create(client)
    r = client.post(f"/projects/{pid}/exports")
    assert r.status_code == 201
    job_id = r.json()["job_id"]
    doc = wait_for_job(client, job_id)
    assert doc["state"] == "done", doc
    assert doc["progress"] == {"frames_done": scene.meta.frame_count,
                               "total": scene.meta.frame_count}
    manifest = doc["manifest"]
    assert manifest["frame_count"] == scene.meta.frame_count
    out_dir = tmp_path / "exports" / pid / job_id
    with open(out_dir / manifest["frames"][0]["file"], "rb") as f:
        data = f.read()
    assert manifest["frames"][0]["digest"] == \
        "sha256:" + hashlib.sha256(data).hexdigest()
    # a second export of the same project is byte-identical
    job2 = client.post(f"/projects/{pid}/exports").json()["job_id"]
    doc2 = wait_for_job(client, job2)
    assert doc2["manifest"]["digest"] == manifest["digest"]


def test_export_frames_match_preview_frames(service):
    scene, client, tmp_path = service
    pid = create(client)
    job_id = client.post(f"/projects/{pid}/exports").json()["job_id"]
    manifest = wait_for_job(client, job_id)["manifest"]
    out_dir = tmp_path / "exports" / pid / job_id
    for entry in manifest["frames"][:5]:
        with open(out_dir / entry["file"], "rb") as f:
            data = f.read()
        preview = client.get(f"/projects/{pid}/frames/{entry['index']}")
        assert data == preview.content


def test_unknown_export_job_404(service):
    _, client, _ = service
    r = client.get("/exports/zz")
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "unknown_job"
