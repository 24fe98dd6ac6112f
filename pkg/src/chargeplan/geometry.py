"""Primitives for sphere-capped-cone coverage geometry.

Positions are metre-valued numpy arrays of shape (3,); directions are unit
vectors. A charging beam is modelled as a sphere-capped cone: apex at the
transmitter position, axis along the beam direction, half-angle ``half_angle``
and radial reach ``range``. A point is covered when it lies within the reach
and within the half-angle of the axis.

The boundary-cone machinery (``boundary_directions``, ``projected_angle``,
``angle_to_direction``) parameterizes the one-dimensional family of beam
directions that keep a chosen reference point exactly on the cone boundary.
The parameter is an angle in the plane perpendicular to the apex-to-reference
ray, measured in a deterministic right-handed frame, so directions and plane
angles convert back and forth losslessly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Vec3 = np.ndarray

TWO_PI = 2.0 * math.pi

# slack for boundary-membership tests (radians); a point sitting exactly on
# the cone surface must count as covered despite rounding
ANGLE_TOL = 1e-9

_Z = np.array([0.0, 0.0, 1.0])
_X = np.array([1.0, 0.0, 0.0])


class GeometryError(ValueError):
    """Raised for degenerate geometric input (zero vectors, bad angles)."""


def normalize(v: Vec3) -> Vec3:
    n = np.linalg.norm(v)
    if n < 1e-15:
        raise GeometryError("cannot normalize a zero-length vector")
    return np.asarray(v, dtype=float) / n


def angle_between(u: Vec3, v: Vec3) -> float:
    """Angle between two vectors in [0, pi], stable near 0 and pi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    c = float(np.dot(u, v))
    s = float(np.linalg.norm(np.cross(u, v)))
    if c == 0.0 and s == 0.0:
        raise GeometryError("angle undefined for zero-length vector")
    return math.atan2(s, c)


def wrap_angle(theta: float) -> float:
    """Map an angle to [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class ConeParams:
    """Beam shape: half-angle (radians) and radial reach (metres).

    The half-angle is half the full apex angle; a beam with apex angle
    pi/3 has ``half_angle = pi/6``.
    """

    half_angle: float
    range: float

    def __post_init__(self):
        if not 0.0 < self.half_angle < math.pi / 2:
            raise GeometryError(f"half_angle must be in (0, pi/2), got {self.half_angle}")
        if self.range <= 0.0:
            raise GeometryError(f"range must be positive, got {self.range}")


def cone_covers(apex: Vec3, direction: Vec3, cone: ConeParams, point: Vec3,
                *, tol: float = ANGLE_TOL) -> bool:
    """True when ``point`` lies inside the sphere-capped cone.

    Boundary points count as covered: the distance test is ``<= range`` and
    the angular test allows ``tol`` radians of slack.

    Raises
    ------
    GeometryError
        If ``point`` coincides with ``apex`` (the angular test is undefined
        there; callers decide how apex-coincident points are treated).
    """
    r = np.asarray(point, dtype=float) - np.asarray(apex, dtype=float)
    d = float(np.linalg.norm(r))
    if d < 1e-15:
        raise GeometryError("point coincides with the cone apex")
    if d > cone.range:
        return False
    return angle_between(direction, r) <= cone.half_angle + tol


def boundary_directions(origin: Vec3, a: Vec3, b: Vec3, half_angle: float,
                        *, tol: float = 1e-10) -> list[Vec3]:
    """Beam directions placing both ``a`` and ``b`` on the cone boundary.

    Parameters
    ----------
    origin : Vec3
        Cone apex O.
    a, b : Vec3
        Points to pin to the boundary; only their directions from O matter.
    half_angle : float
        Cone half-angle h in (0, pi/2).
    tol : float
        Slack (radians) for deciding the separating-angle cases.

    Returns
    -------
    list of unit Vec3
        Two directions when the separation angle(OA, OB) < 2h, one when it
        equals 2h (the bisector), none when the pair cannot share a cone.

    Notes
    -----
    With e1 = unit(OA), e2 = unit(OB), phi = angle(e1, e2), the solutions are

        v = sec(phi/2) * unit(e1 + e2) +- sqrt(tan(h)^2 - tan(phi/2)^2) * unit(e2 x e1)

    normalized to unit length; each makes angle exactly h with both rays.
    """
    o = np.asarray(origin, dtype=float)
    e1 = normalize(np.asarray(a, dtype=float) - o)
    e2 = normalize(np.asarray(b, dtype=float) - o)
    phi = angle_between(e1, e2)
    span = 2.0 * half_angle
    if phi > span + tol:
        return []
    half = 0.5 * phi
    bisector = normalize(e1 + e2)
    if phi >= span - tol:
        return [bisector]
    disc = math.tan(half_angle) ** 2 - math.tan(half) ** 2
    if disc <= 0.0:
        return [bisector]
    base = bisector / math.cos(half)
    off = math.sqrt(disc) * normalize(np.cross(e2, e1))
    return [normalize(base + off), normalize(base - off)]


def reference_frame(e_oa: Vec3) -> tuple[Vec3, Vec3]:
    """Deterministic right-handed frame (e_ref, e_aux) perpendicular to e_oa.

    e_ref = unit(e_oa x z), falling back to unit(e_oa x x-axis) when e_oa is
    parallel to z; e_aux = unit(e_oa x e_ref). Plane angles are measured from
    e_ref toward e_aux.
    """
    c = np.cross(e_oa, _Z)
    if np.linalg.norm(c) < 1e-9:
        c = np.cross(e_oa, _X)
    e_ref = normalize(c)
    e_aux = normalize(np.cross(e_oa, e_ref))
    return e_ref, e_aux


def projected_angle(origin: Vec3, a: Vec3, direction: Vec3) -> tuple[Vec3, float]:
    """Project a beam direction onto the plane through A perpendicular to OA.

    The ray from O along ``direction`` is intersected with the plane that
    passes through A with normal unit(OA); the intersection point, expressed
    as an offset from A in the (e_ref, e_aux) frame, yields the plane angle.

    Parameters
    ----------
    origin, a : Vec3
        Apex O and reference point A (A distinct from O).
    direction : Vec3
        Beam direction; must satisfy direction . OA > 0, i.e. point into the
        half-space containing the plane.

    Returns
    -------
    (point, theta)
        ``point`` is the ray-plane intersection; ``theta`` in [0, 2*pi) is
        its plane angle around A.

    Raises
    ------
    GeometryError
        If the direction is perpendicular to or points away from OA, or if
        it is parallel to OA (no unique plane angle).
    """
    o = np.asarray(origin, dtype=float)
    oa = np.asarray(a, dtype=float) - o
    la = float(np.linalg.norm(oa))
    if la < 1e-15:
        raise GeometryError("reference point coincides with the origin")
    e_oa = oa / la
    u = normalize(direction)
    denom = float(np.dot(u, e_oa))
    if denom <= 1e-12:
        raise GeometryError("direction does not cross the reference plane")
    point = o + (la / denom) * u
    w = point - np.asarray(a, dtype=float)
    if float(np.linalg.norm(w)) < 1e-12 * max(1.0, la):
        raise GeometryError("direction is parallel to OA; plane angle undefined")
    e_ref, e_aux = reference_frame(e_oa)
    theta = math.atan2(float(np.dot(w, e_aux)), float(np.dot(w, e_ref)))
    return point, wrap_angle(theta)


def angle_to_direction(origin: Vec3, a: Vec3, theta: float,
                       half_angle: float) -> tuple[Vec3, Vec3]:
    """Inverse of :func:`projected_angle` for boundary cones through A.

    Builds the in-plane unit offset e_theta = cos(theta) e_ref +
    sin(theta) e_aux, places the plane point at A + |OA| tan(h) e_theta and
    returns the unit direction from O to that point together with the point.
    The returned direction makes angle exactly ``half_angle`` with OA.
    """
    o = np.asarray(origin, dtype=float)
    av = np.asarray(a, dtype=float)
    oa = av - o
    la = float(np.linalg.norm(oa))
    if la < 1e-15:
        raise GeometryError("reference point coincides with the origin")
    e_oa = oa / la
    e_ref, e_aux = reference_frame(e_oa)
    e_theta = math.cos(theta) * e_ref + math.sin(theta) * e_aux
    point = av + la * math.tan(half_angle) * e_theta
    return normalize(point - o), point
