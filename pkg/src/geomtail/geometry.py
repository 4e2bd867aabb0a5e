"""Planar Euclidean primitives and ball-intersection predicates.

All predicates are pure functions of their inputs and safe to call from any
number of workers.  Comparisons that feed indicator statistics are made on
squared distances so that every caller (reference Python paths and compiled
kernels alike) resolves boundary cases identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriple

# Degeneracy tolerance, in unit-cube coordinates.  Random configurations are
# degenerate with probability zero, so this only silences floating-point noise.
EPS_GEOM = 1e-12


def diameter(points) -> float:
    """Largest pairwise Euclidean distance of a nonempty point list.

    A singleton has diameter 0.  Raises ``ValueError`` on an empty input.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.shape[0] == 0:
        raise ValueError("diameter of an empty point set is undefined")
    if pts.shape[0] == 1:
        return 0.0
    diffs = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diffs ** 2).sum(axis=-1).max()))


@dataclass(frozen=True)
class Circumcircle:
    """Center and radius of the circle through three non-collinear points."""

    center: np.ndarray
    radius: float


def _twice_signed_area(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def circumcircle(a, b, c) -> Circumcircle:
    """Circumcircle of a planar triple.

    Raises :class:`DegenerateTriple` when the points are collinear within
    ``EPS_GEOM`` (measured by the absolute twice-signed area).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if a.shape != (2,) or b.shape != (2,) or c.shape != (2,):
        raise ValueError("circumcircle is defined for planar points only")
    area2 = _twice_signed_area(a, b, c)
    if abs(area2) <= EPS_GEOM:
        raise DegenerateTriple((tuple(a), tuple(b), tuple(c)))
    # Solve relative to a to avoid cancellation at large offsets.
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = np.array([a[0] + ux, a[1] + uy])
    radius = float(np.hypot(ux, uy))
    return Circumcircle(center=center, radius=radius)


def circumcenter_in_open_hull(a, b, c) -> bool:
    """Whether the circumcenter lies strictly inside the triangle.

    Equivalent to the triangle being acute; right angles (circumcenter on the
    boundary of the hull) and boundary cases within ``EPS_GEOM`` return False.
    Collinear inputs raise :class:`DegenerateTriple`.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if abs(_twice_signed_area(a, b, c)) <= EPS_GEOM:
        raise DegenerateTriple((tuple(a), tuple(b), tuple(c)))
    for p, q, s in ((a, b, c), (b, c, a), (c, a, b)):
        # Angle at p is strictly acute iff (q-p).(s-p) > 0.
        dot = (q[0] - p[0]) * (s[0] - p[0]) + (q[1] - p[1]) * (s[1] - p[1])
        if dot <= EPS_GEOM:
            return False
    return True


def enclosing_radius(a, b, c) -> float:
    """Radius of the smallest disk covering a planar triple.

    This is the circumradius for acute triangles and half the longest edge
    otherwise (collinear triples fall in the second case).  Closed balls of
    radius ``s`` around the three points share a common point iff
    ``s >= enclosing_radius``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    e2 = sorted(
        (
            float(((b - a) ** 2).sum()),
            float(((c - b) ** 2).sum()),
            float(((a - c) ** 2).sum()),
        )
    )
    if e2[2] >= e2[0] + e2[1]:
        # Right or obtuse (or degenerate): midpoint of the longest edge works.
        return 0.5 * np.sqrt(e2[2])
    return circumcircle(a, b, c).radius


def cech_one_cycle(a, b, c, r: float) -> int:
    """Indicator that radius-``r/2`` balls around a triple form a one-cycle.

    Returns 1 iff every pair of closed balls of radius ``r/2`` intersects
    (pairwise distances at most ``r``) while the triple intersection is empty.
    The triple-intersection test is analytic: the common intersection is
    nonempty iff ``r/2 >= enclosing_radius``.  Degenerate triples return 0.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    r2 = r * r
    longest2 = max(
        float(((b - a) ** 2).sum()),
        float(((c - b) ** 2).sum()),
        float(((a - c) ** 2).sum()),
    )
    if longest2 > r2:
        return 0
    s_star = enclosing_radius(a, b, c)
    return 1 if r < 2.0 * s_star else 0


def triple_intersection_oracle(a, b, c, s: float, grid_step: float) -> bool:
    """Brute-force check that three closed balls of radius ``s`` intersect.

    Samples the bounding box of the (potential) intersection region on a grid
    of pitch ``grid_step`` and reports whether some grid point lies inside all
    three balls.  Exists to cross-check the analytic predicate; never used on
    a production path.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    pts = np.array([a, b, c], dtype=float)
    lo = pts.max(axis=0) - s
    hi = pts.min(axis=0) + s
    if (lo > hi).any():
        return False
    xs = np.arange(lo[0], hi[0] + 0.5 * grid_step, grid_step)
    ys = np.arange(lo[1], hi[1] + 0.5 * grid_step, grid_step)
    s2 = s * s
    inside = None
    for p in pts:
        dx2 = (xs - p[0]) ** 2
        dy2 = (ys - p[1]) ** 2
        mask = dx2[:, None] + dy2[None, :] <= s2
        inside = mask if inside is None else (inside & mask)
        if not inside.any():
            return False
    return bool(inside.any())
