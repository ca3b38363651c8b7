from fractions import Fraction

import numpy as np
import pytest

from courtcanvas import synth
from courtcanvas.synth import EntityScript, Scene, SceneSpec


def spec_one(start=(10.0, 8.0), velocity=(2.0, 0.5), size=(6, 10), frames=20):
    return SceneSpec(frame_count=frames, entities=(
        EntityScript("1", start, velocity, size),))


def test_determinism_same_seed():
    a, b = Scene(spec_one(), seed=42), Scene(spec_one(), seed=42)
    for n in (0, 7, 19):
        assert np.array_equal(a.frame(n), b.frame(n))
        assert np.array_equal(a.mask(n), b.mask(n))
    assert a.dataset() == b.dataset()


def test_entity_colors_depend_on_seed():
    a, b = Scene(spec_one(), seed=1), Scene(spec_one(), seed=2)
    assert a.colors["1"] != b.colors["1"]


def test_bbox_position_by_construction():
    # x = round(10 + 2*n): at frame 10 the body starts at column 30
    scene = Scene(spec_one(velocity=(2.0, 0.0)))
    track = scene.dataset().entity("1")
    assert track.samples[10].bbox == (30.0, 8.0, 6.0, 10.0)
    frame = scene.frame(10)
    body = scene.colors["1"]
    assert tuple(frame[8, 30]) == body
    assert tuple(frame[8, 29]) != body


def test_frame_pixels_match_bbox():
    scene = Scene(spec_one())
    for n in (0, 5, 19):
        x, y, w, h = (int(v) for v in scene.dataset().entity("1").samples[n].bbox)
        frame = scene.frame(n)
        assert (frame[y:y + h, x:x + w] == scene.colors["1"]).all()


def test_mask_is_union_of_bboxes():
    spec = SceneSpec(frame_count=10, entities=(
        EntityScript("1", (2.0, 2.0), (1.0, 0.0), (5, 8)),
        EntityScript("2", (30.0, 10.0), (0.0, 1.0), (7, 12)),
    ))
    scene = Scene(spec)
    ds = scene.dataset()
    for n in (0, 4, 9):
        expect = np.zeros((spec.height, spec.width), dtype=np.uint8)
        for track in ds.entities:
            x, y, w, h = (int(v) for v in track.samples[n].bbox)
            expect[y:y + h, x:x + w] = 255
        assert np.array_equal(scene.mask(n), expect)


def test_out_of_bounds_script_rejected():
    with pytest.raises(synth.SynthError, match="leaves the frame"):
        Scene(spec_one(start=(60.0, 8.0), velocity=(2.0, 0.0)))


def test_frame_index_out_of_range():
    scene = Scene(spec_one())
    with pytest.raises(synth.SynthError):
        scene.frame(20)
    with pytest.raises(synth.SynthError):
        scene.mask(-1)


def test_spec_from_doc_round_trip():
    doc = {"width": 64, "height": 36, "fps": [30, 1], "frame_count": 20,
           "sport": "soccer",
           "entities": [{"id": "1", "start": [10, 8], "velocity": [2, 0.5],
                         "size": [6, 10]}]}
    spec = SceneSpec.from_doc(doc)
    assert spec == SceneSpec(frame_count=20, sport="soccer",
                             fps=Fraction(30, 1),
                             entities=(EntityScript("1", (10.0, 8.0),
                                                    (2.0, 0.5), (6, 10)),))


def test_mot_csv_round_trips_through_parser():
    from courtcanvas import ingest
    ds = Scene(spec_one()).dataset()
    parsed = ingest.parse_tracking_mot_csv(synth.dataset_to_mot_csv(ds), ds.meta)
    parsed.sport = ds.sport
    assert parsed == ds


# --- stub captioner ---------------------------------------------------------------


def test_stub_captioner_counts_and_spans():
    spec = SceneSpec(frame_count=70, entities=(
        EntityScript("1", (2.0, 2.0), (0.5, 0.0), (5, 8)),
        EntityScript("2", (30.0, 10.0), (0.0, 0.2), (7, 12)),
    ))
    caps = synth.stub_captioner(Scene(spec).dataset(), every_n_frames=30)
    assert [(c.start_frame, c.end_frame) for c in caps] == [(0, 30), (30, 60), (60, 70)]
    assert all(c.text.startswith("2 players visible") for c in caps)
    # captions never overlap -> valid by construction
    for prev, cur in zip(caps, caps[1:]):
        assert prev.end_frame <= cur.start_frame


def test_stub_captioner_picks_fastest():
    spec = SceneSpec(frame_count=30, entities=(
        EntityScript("slow", (2.0, 2.0), (0.1, 0.0), (4, 6)),
        EntityScript("fast", (30.0, 10.0), (1.0, 0.0), (4, 6)),
    ))
    caps = synth.stub_captioner(Scene(spec).dataset(), every_n_frames=30)
    assert caps[0].text.endswith("fastest: fast")


def test_stub_captioner_empty_dataset():
    from courtcanvas.ingest import TrackingDataset
    from courtcanvas.model import VideoMeta
    ds = TrackingDataset(VideoMeta(64, 36, Fraction(30, 1), 45), "basketball", [])
    caps = synth.stub_captioner(ds, every_n_frames=30)
    assert [c.text for c in caps] == ["0 players visible"] * 2


def test_stub_captioner_deterministic():
    ds = Scene(spec_one(velocity=(0.5, 0.2), frames=60)).dataset()
    assert synth.stub_captioner(ds) == synth.stub_captioner(ds)


def test_stub_captioner_rejects_bad_interval():
    ds = Scene(spec_one()).dataset()
    with pytest.raises(synth.SynthError):
        synth.stub_captioner(ds, every_n_frames=0)
