"""Planar projective math for ground-plane effects.

A homography here is a 3x3 real matrix normalized so the bottom-right
element is 1.  The default ground matrix maps the unit square to a
foreshortened trapezoid in the lower part of the frame; callers that want
ground effects normalize scene pixels into the unit square first.
"""

from __future__ import annotations

import math

import numpy as np

DEGENERATE_EPS = 1e-9
SINGULAR_EPS = 1e-12


class GeometryError(ValueError):
    """Singular matrices and degenerate projected points."""


def normalize(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64).reshape(3, 3)
    if abs(m[2, 2]) < SINGULAR_EPS:
        raise GeometryError("homography has (3,3) element ~ 0")
    m = m / m[2, 2]
    if abs(np.linalg.det(m)) <= SINGULAR_EPS:
        raise GeometryError("homography is singular")
    return m


def apply(h: np.ndarray, p: tuple[float, float]) -> tuple[float, float]:
    x, y = p
    denom = h[2, 0] * x + h[2, 1] * y + h[2, 2]
    if abs(denom) < DEGENERATE_EPS:
        raise GeometryError(f"point {p} is degenerate under this homography")
    return (
        (h[0, 0] * x + h[0, 1] * y + h[0, 2]) / denom,
        (h[1, 0] * x + h[1, 1] * y + h[1, 2]) / denom,
    )


def inverse(h: np.ndarray) -> np.ndarray:
    if abs(np.linalg.det(h)) <= SINGULAR_EPS:
        raise GeometryError("homography is singular")
    return normalize(np.linalg.inv(h))


def from_correspondences(
    src: list[tuple[float, float]], dst: list[tuple[float, float]]
) -> np.ndarray:
    """Direct linear solve from exactly four point correspondences."""
    if len(src) != 4 or len(dst) != 4:
        raise GeometryError("need exactly four correspondences")
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i, ((x, y), (u, v)) in enumerate(zip(src, dst)):
        a[2 * i] = [x, y, 1, 0, 0, 0, -x * u, -y * u]
        b[2 * i] = u
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -x * v, -y * v]
        b[2 * i + 1] = v
    try:
        coeffs = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"degenerate correspondences: {exc}") from exc
    return normalize(np.append(coeffs, 1.0).reshape(3, 3))


def default_ground_homography(width: int, height: int) -> np.ndarray:
    """Fixed unit-square -> trapezoid map giving court-plane foreshortening.

    Constants (0.2/0.8 top inset, 0.55 horizon) are a visual calibration for
    broadcast camera angles; override per project when a better matrix is
    known.
    """
    src = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    dst = [
        (0.2 * width, 0.55 * height),
        (0.8 * width, 0.55 * height),
        (0.0, float(height)),
        (float(width), float(height)),
    ]
    return from_correspondences(src, dst)


def project_polyline(
    h: np.ndarray,
    points: list[tuple[float, float]],
    max_seg_len: float,
) -> list[tuple[float, float]]:
    """Map a polyline through h, subdividing so straight input segments stay
    visually correct under perspective.  No pre-image segment exceeds
    max_seg_len."""
    if len(points) < 2:
        raise GeometryError("polyline needs at least two points")
    if max_seg_len <= 0:
        raise GeometryError("max_seg_len must be > 0")
    dense: list[tuple[float, float]] = [points[0]]
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        n = max(1, math.ceil(math.hypot(x1 - x0, y1 - y0) / max_seg_len))
        for j in range(1, n + 1):
            t = j / n
            dense.append((x0 + (x1 - x0) * t, y0 + (y1 - y0) * t))
    return [apply(h, p) for p in dense]


def ellipse_for_anchor(
    h: np.ndarray,
    center: tuple[float, float],
    radius: float,
    n_vertices: int,
) -> list[tuple[float, float]]:
    """Circle around center (in h's input space) sampled at n uniform angles,
    each vertex mapped through h; a closed polygon (first vertex not repeated)."""
    if radius <= 0:
        raise GeometryError("radius must be > 0")
    if n_vertices < 8:
        raise GeometryError("need at least 8 vertices")
    cx, cy = center
    out = []
    for i in range(n_vertices):
        theta = 2.0 * math.pi * i / n_vertices
        out.append(apply(h, (cx + radius * math.cos(theta), cy + radius * math.sin(theta))))
    return out


def smooth_path(
    points: list[tuple[float, float]], samples_per_span: int = 16
) -> list[tuple[float, float]]:
    """Centripetal Catmull-Rom through all control points.

    Emits samples_per_span points per control span plus the final control
    point; every control point appears exactly in the output.
    """
    if len(points) < 2:
        raise GeometryError("path needs at least two points")
    pts = [np.asarray(p, dtype=np.float64) for p in points]
    # reflect endpoints so the end spans have well-defined tangents
    first = 2.0 * pts[0] - pts[1]
    last = 2.0 * pts[-1] - pts[-2]
    padded = [first] + pts + [last]

    out: list[tuple[float, float]] = []
    for i in range(len(pts) - 1):
        p0, p1, p2, p3 = padded[i], padded[i + 1], padded[i + 2], padded[i + 3]
        out.append((float(p1[0]), float(p1[1])))
        for j in range(1, samples_per_span):
            out.append(_catmull_rom_point(p0, p1, p2, p3, j / samples_per_span))
    out.append((float(pts[-1][0]), float(pts[-1][1])))
    return out


def _alpha_knot(t: float, a: np.ndarray, b: np.ndarray) -> float:
    # centripetal parameterization: alpha = 0.5
    return t + float(np.hypot(*(b - a))) ** 0.5


def _catmull_rom_point(
    p0: np.ndarray, p1: np.ndarray, p2: np.ndarray, p3: np.ndarray, u: float
) -> tuple[float, float]:
    t0 = 0.0
    t1 = _alpha_knot(t0, p0, p1)
    t2 = _alpha_knot(t1, p1, p2)
    t3 = _alpha_knot(t2, p2, p3)
    if t1 == t0 or t2 == t1 or t3 == t2:
        # coincident control points degenerate to linear interpolation
        q = p1 + (p2 - p1) * u
        return (float(q[0]), float(q[1]))
    t = t1 + (t2 - t1) * u
    a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1
    a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2
    a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3
    b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2
    b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3
    c = (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2
    return (float(c[0]), float(c[1]))


def to_doc(h: np.ndarray) -> list[float]:
    return [float(v) for v in np.asarray(h).reshape(9)]


def from_doc(values) -> np.ndarray:
    if not (isinstance(values, list) and len(values) == 9):
        raise GeometryError("homography: expected 9 row-major reals")
    return normalize(np.array(values, dtype=np.float64).reshape(3, 3))
