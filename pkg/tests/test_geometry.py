import math

import numpy as np
import pytest

from courtcanvas import geometry as geo

IDENTITY = np.eye(3)


def random_well_conditioned(rng):
    """Identity plus a bounded perturbation: always far from singular."""
    m = np.eye(3) + rng.uniform(-0.2, 0.2, size=(3, 3))
    m[2, 0] = rng.uniform(-1e-3, 1e-3)
    m[2, 1] = rng.uniform(-1e-3, 1e-3)
    m[2, 2] = 1.0
    return geo.normalize(m)


def test_apply_identity():
    assert geo.apply(IDENTITY, (5.0, 7.0)) == (5.0, 7.0)


def test_apply_projective_division():
    h = np.array([[1, 0, 0], [0, 1, 0], [0.001, 0, 1]], dtype=float)
    x, y = geo.apply(h, (100.0, 200.0))
    assert abs(x - 100.0 / 1.1) < 1e-9
    assert abs(y - 200.0 / 1.1) < 1e-9


def test_apply_degenerate_denominator():
    h = np.array([[1, 0, 0], [0, 1, 0], [-0.01, 0, 1]], dtype=float)
    with pytest.raises(geo.GeometryError):
        geo.apply(h, (100.0, 0.0))


def test_inverse_identity():
    assert np.allclose(geo.inverse(IDENTITY), IDENTITY)


def test_inverse_round_trip_skew():
    h = geo.normalize(np.array([[1, 0, 0], [0, 1, 0], [0.001, 0, 1.0]]))
    p = (37.5, 81.25)
    q = geo.apply(geo.inverse(h), geo.apply(h, p))
    assert math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-9


def test_inverse_singular():
    with pytest.raises(geo.GeometryError):
        geo.inverse(np.array([[1, 2, 3], [2, 4, 6], [0, 0, 1]], dtype=float))


def test_round_trip_many_random_matrices():
    rng = np.random.RandomState(17)
    for _ in range(1000):
        h = random_well_conditioned(rng)
        p = (float(rng.uniform(0, 1920)), float(rng.uniform(0, 1080)))
        q = geo.apply(geo.inverse(h), geo.apply(h, p))
        assert math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-9


def test_composition_associativity():
    rng = np.random.RandomState(3)
    for _ in range(100):
        a = random_well_conditioned(rng)
        b = random_well_conditioned(rng)
        p = (float(rng.uniform(0, 100)), float(rng.uniform(0, 100)))
        left = geo.apply(geo.normalize(a @ b), p)
        right = geo.apply(a, geo.apply(b, p))
        assert math.hypot(left[0] - right[0], left[1] - right[1]) < 1e-9


def test_default_ground_corners():
    w, h = 1920, 1080
    m = geo.default_ground_homography(w, h)
    expect = {
        (0.0, 0.0): (0.2 * w, 0.55 * h),
        (1.0, 0.0): (0.8 * w, 0.55 * h),
        (0.0, 1.0): (0.0, float(h)),
        (1.0, 1.0): (float(w), float(h)),
    }
    for src, dst in expect.items():
        got = geo.apply(m, src)
        assert math.hypot(got[0] - dst[0], got[1] - dst[1]) < 1e-6


def test_default_ground_midpoint_inside_and_invertible():
    m = geo.default_ground_homography(1920, 1080)
    x, y = geo.apply(m, (0.5, 0.5))
    assert 0.2 * 1920 < x < 0.8 * 1920
    assert 0.55 * 1080 < y < 1080
    geo.inverse(m)  # must not raise


def test_from_correspondences_matches_dlt():
    rng = np.random.RandomState(5)
    src = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    dst = [(10.0, 12.0), (90.0, 8.0), (95.0, 100.0), (5.0, 97.0)]
    h = geo.from_correspondences(src, dst)
    for s, d in zip(src, dst):
        got = geo.apply(h, s)
        assert math.hypot(got[0] - d[0], got[1] - d[1]) < 1e-6


def test_project_polyline_identity_and_count():
    pts = [(0.0, 0.0), (100.0, 0.0)]
    out = geo.project_polyline(IDENTITY, pts, 25.0)
    assert len(out) == 5
    assert out[0] == (0.0, 0.0) and out[-1] == (100.0, 0.0)
    for p in out:
        assert abs(p[1]) < 1e-12


def test_project_polyline_needs_two_points():
    with pytest.raises(geo.GeometryError):
        geo.project_polyline(IDENTITY, [(0.0, 0.0)], 10.0)


def test_ellipse_identity_chord_bound():
    n = 32
    poly = geo.ellipse_for_anchor(IDENTITY, (50.0, 50.0), 10.0, n)
    assert len(poly) == n
    bound = 10.0 * (1 - math.cos(math.pi / n)) + 1e-9
    for x, y in poly:
        r = math.hypot(x - 50.0, y - 50.0)
        assert abs(r - 10.0) <= bound + 1e-9


def test_ellipse_min_vertices():
    with pytest.raises(geo.GeometryError):
        geo.ellipse_for_anchor(IDENTITY, (0.0, 0.0), 1.0, 4)


def test_ellipse_foreshortened_under_ground_matrix():
    m = geo.default_ground_homography(1920, 1080)
    center = geo.apply(geo.inverse(m), (960.0, 900.0))
    poly = geo.ellipse_for_anchor(m, center, 0.05, 32)
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    assert (max(ys) - min(ys)) < (max(xs) - min(xs))


def test_smooth_path_two_points_straight():
    out = geo.smooth_path([(0.0, 0.0), (16.0, 0.0)])
    for x, y in out:
        assert abs(y) < 1e-9
    assert out[0] == (0.0, 0.0) and out[-1] == (16.0, 0.0)


def test_smooth_path_interpolates_controls():
    controls = [(0.0, 0.0), (10.0, 8.0), (25.0, -3.0), (40.0, 5.0)]
    out = geo.smooth_path(controls)
    for c in controls:
        assert any(math.hypot(p[0] - c[0], p[1] - c[1]) < 1e-9 for p in out)


def test_smooth_path_symmetry():
    # an S-curve symmetric under 180-degree rotation about its midpoint
    controls = [(-2.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (2.0, 1.0)]
    out = geo.smooth_path(controls)
    rotated = [(-x, -y) for x, y in reversed(out)]
    for (x1, y1), (x2, y2) in zip(out, rotated):
        assert math.hypot(x1 - x2, y1 - y2) < 1e-6


def test_doc_round_trip():
    m = geo.default_ground_homography(640, 360)
    doc = geo.to_doc(m)
    assert len(doc) == 9 and doc[8] == 1.0
    assert np.allclose(geo.from_doc(doc), m)


def test_from_doc_rejects_bad_input():
    with pytest.raises(geo.GeometryError):
        geo.from_doc([1.0] * 8)
