import json
import os
from fractions import Fraction

import numpy as np
import pytest
from PIL import Image

from courtcanvas import export as export_mod
from courtcanvas import ingest, synth
from courtcanvas.model import Placement, VideoMeta

from conftest import make_scene, write_assets

META = VideoMeta(64, 36, Fraction(30, 1), 120)


def canonical_doc(entities, meta=META, sport="basketball"):
    return json.dumps({
        "meta": {"width": meta.width, "height": meta.height,
                 "fps": [meta.fps.numerator, meta.fps.denominator],
                 "frame_count": meta.frame_count},
        "sport": sport,
        "entities": entities,
    }).encode()


# --- canonical parser ---------------------------------------------------------


def test_canonical_empty_entities():
    ds = ingest.parse_tracking_canonical(canonical_doc([]))
    assert ds.entities == [] and ds.meta == META


def test_canonical_synth_round_trip():
    scene = make_scene(seed=4, n_entities=2, frame_count=120)
    truth = scene.dataset()
    parsed = ingest.parse_tracking_canonical(ingest.dataset_to_canonical(truth))
    assert parsed == truth


def test_canonical_zero_width_bbox_names_record():
    doc = canonical_doc([{"id": "7", "samples": [
        {"frame": 0, "bbox": [1, 1, 0, 5], "conf": 1.0}]}])
    with pytest.raises(ingest.IngestError, match=r"entities\[0\].samples\[0\]"):
        ingest.parse_tracking_canonical(doc)


def test_canonical_duplicate_frame_rejected():
    doc = canonical_doc([{"id": "7", "samples": [
        {"frame": 3, "bbox": [1, 1, 2, 2]}, {"frame": 3, "bbox": [2, 2, 2, 2]}]}])
    with pytest.raises(ingest.IngestError, match="duplicate frame 3"):
        ingest.parse_tracking_canonical(doc)


def test_canonical_duplicate_entity_rejected():
    doc = canonical_doc([{"id": "7", "samples": []}, {"id": "7", "samples": []}])
    with pytest.raises(ingest.IngestError, match="duplicate entity id"):
        ingest.parse_tracking_canonical(doc)


def test_canonical_unknown_sport_rejected():
    with pytest.raises(ingest.IngestError, match="sport"):
        ingest.parse_tracking_canonical(canonical_doc([], sport="cricket"))


# --- MOT parser ---------------------------------------------------------------


def test_mot_one_based_conversion():
    ds = ingest.parse_tracking_mot_csv(b"1,7,10,20,30,60,0.9\n", META)
    track = ds.entity("7")
    assert list(track.samples) == [0]
    assert track.samples[0].bbox == (10.0, 20.0, 30.0, 60.0)
    assert track.samples[0].conf == 0.9


def test_mot_empty_file():
    assert ingest.parse_tracking_mot_csv(b"", META).entities == []


def test_mot_zero_frame_rejected():
    with pytest.raises(ingest.IngestError, match="line 1"):
        ingest.parse_tracking_mot_csv(b"0,7,1,1,2,2,1\n", META)


def test_mot_non_numeric_rejected():
    with pytest.raises(ingest.IngestError, match="line 2"):
        ingest.parse_tracking_mot_csv(b"1,7,1,1,2,2,1\n1,7,x,1,2,2,1\n", META)


def test_parsers_agree_on_synth_truth():
    scene = make_scene(seed=9, n_entities=3, frame_count=40)
    truth = scene.dataset()
    canonical = ingest.parse_tracking_canonical(ingest.dataset_to_canonical(truth))
    mot = ingest.parse_tracking_mot_csv(synth.dataset_to_mot_csv(truth), truth.meta)
    mot.sport = canonical.sport
    mot.entities.sort(key=lambda t: t.entity_id)
    canonical.entities.sort(key=lambda t: t.entity_id)
    assert mot == canonical


# --- interpolation -------------------------------------------------------------


def track_of(samples):
    t = ingest.EntityTrack("e")
    for f, bbox in samples:
        t.samples[f] = ingest.Sample(f, bbox)
    return t


def test_interpolation_linear_oracle():
    t = track_of([(10, (0.0, 0.0, 10.0, 20.0)), (14, (8.0, 4.0, 10.0, 20.0))])
    out = ingest.interpolate_gaps(t, 5)
    for i, f in enumerate((11, 12, 13), start=1):
        s = out.samples[f]
        assert s.bbox == (2.0 * i, 1.0 * i, 10.0, 20.0)
        assert s.interpolated
    assert not out.samples[10].interpolated and not out.samples[14].interpolated


def test_interpolation_respects_max_gap():
    t = track_of([(0, (0.0, 0.0, 5.0, 5.0)), (9, (8.0, 0.0, 5.0, 5.0))])
    out = ingest.interpolate_gaps(t, 5)
    assert sorted(out.samples) == [0, 9]


def test_interpolation_identity_on_contiguous():
    t = track_of([(i, (float(i), 0.0, 5.0, 5.0)) for i in range(5)])
    assert ingest.interpolate_gaps(t, 5) == t


def test_interpolation_idempotent():
    t = track_of([(0, (0.0, 0.0, 5.0, 5.0)), (4, (8.0, 4.0, 5.0, 5.0)),
                  (20, (0.0, 0.0, 5.0, 5.0))])
    once = ingest.interpolate_gaps(t, 6)
    twice = ingest.interpolate_gaps(once, 6)
    assert once == twice


def test_interpolation_keypoints():
    t = ingest.EntityTrack("e")
    kp0 = tuple((0.0, 0.0) for _ in range(17))
    kp2 = tuple((4.0, 8.0) for _ in range(17))
    t.samples[0] = ingest.Sample(0, (0.0, 0.0, 2.0, 2.0), 1.0, kp0)
    t.samples[2] = ingest.Sample(2, (0.0, 0.0, 2.0, 2.0), 1.0, kp2)
    out = ingest.interpolate_gaps(t, 3)
    assert out.samples[1].keypoints == tuple((2.0, 4.0) for _ in range(17))


# --- anchors -------------------------------------------------------------------


def dataset_one_bbox(bbox=(100.0, 100.0, 50.0, 100.0), keypoints=None):
    meta = VideoMeta(640, 480, Fraction(30, 1), 10)
    t = ingest.EntityTrack("p")
    t.samples[0] = ingest.Sample(0, bbox, 1.0, keypoints)
    return ingest.TrackingDataset(meta, "basketball", [t])


def test_anchor_bbox_fallbacks():
    ds = dataset_one_bbox()
    assert ingest.resolve_anchor(ds, "p", 0, Placement.GROUND) == (125.0, 200.0)
    assert ingest.resolve_anchor(ds, "p", 0, Placement.WAIST) == (125.0, 150.0)
    assert ingest.resolve_anchor(ds, "p", 0, Placement.HEAD) == (125.0, 100.0)


def test_anchor_keypoint_rules():
    kp = [None] * 17
    kp[1], kp[2] = (120.0, 110.0), (130.0, 112.0)    # eyes
    kp[11], kp[12] = (115.0, 150.0), (135.0, 152.0)  # hips
    kp[15], kp[16] = (118.0, 195.0), (132.0, 199.0)  # ankles
    ds = dataset_one_bbox(keypoints=tuple(kp))
    assert ingest.resolve_anchor(ds, "p", 0, Placement.HEAD) == (125.0, 111.0 - 15.0)
    assert ingest.resolve_anchor(ds, "p", 0, Placement.WAIST) == (125.0, 151.0)
    assert ingest.resolve_anchor(ds, "p", 0, Placement.GROUND) == (125.0, 197.0)


def test_anchor_absent_sample():
    ds = dataset_one_bbox()
    assert ingest.resolve_anchor(ds, "p", 5, Placement.GROUND) is None


def test_anchor_unknown_entity():
    with pytest.raises(ingest.IngestError):
        ingest.resolve_anchor(dataset_one_bbox(), "zz", 0, Placement.GROUND)


# --- frame loaders -------------------------------------------------------------


def test_image_dir_round_trip(tmp_path):
    scene = make_scene(seed=2, frame_count=5)
    write_assets(scene, str(tmp_path))
    video = ingest.open_video(str(tmp_path / "frames"))
    masks = ingest.open_masks(str(tmp_path / "masks"))
    assert video.frame_count == 5 and masks.frame_count == 5
    assert np.array_equal(ingest.load_video_frame(video, 0), scene.frame(0))
    assert np.array_equal(ingest.load_mask_frame(masks, 3), scene.mask(3))
    with pytest.raises(ingest.IngestError):
        video.get_frame(5)


def test_image_dir_contiguity(tmp_path):
    d = tmp_path / "frames"
    d.mkdir()
    Image.new("RGB", (16, 16)).save(d / "frame_000000.png")
    Image.new("RGB", (16, 16)).save(d / "frame_000002.png")
    with pytest.raises(ingest.IngestError, match="contiguous"):
        ingest.open_video(str(d))


def test_mask_dimension_mismatch(tmp_path):
    d = tmp_path / "masks"
    d.mkdir()
    Image.new("L", (16, 16)).save(d / "mask_000000.png")
    Image.new("L", (8, 8)).save(d / "mask_000001.png")
    masks = ingest.open_masks(str(d))
    with pytest.raises(ingest.IngestError, match="dimensions"):
        masks.get_frame(1)


def test_y4m_source_round_trips_gray(tmp_path):
    # a uniform-gray stream decodes back to exactly the same gray
    path = tmp_path / "clip.y4m"
    frame = np.full((36, 64, 3), 128, dtype=np.uint8)
    y, cb, cr = export_mod.rgb_to_yuv420(frame)
    with open(path, "wb") as f:
        f.write(export_mod.y4m_header(64, 36, Fraction(30, 1)))
        for _ in range(3):
            f.write(b"FRAME\n" + y.tobytes() + cb.tobytes() + cr.tobytes())
    src = ingest.open_video(str(path))
    assert src.frame_count == 3
    assert np.array_equal(src.get_frame(1), frame)


def test_asset_store_escape_rejected(tmp_path):
    store = ingest.AssetStore(str(tmp_path))
    with pytest.raises(ingest.IngestError, match="escapes"):
        store.video("../outside")


def test_asset_store_missing(tmp_path):
    store = ingest.AssetStore(str(tmp_path))
    with pytest.raises(ingest.IngestError, match="not found"):
        store.masks("nope")
