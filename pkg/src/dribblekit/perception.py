"""Equidistant fisheye geometry for ball localisation from detection boxes.

Camera frame: +z along the optical axis, +x to the image right, +y to the
image bottom. Body frame: origin at the torso, +x forward, +y left, +z up,
with the ground plane at ``z = -body_height``. Under the equidistant model
a ray at polar angle ``theta`` from the optical axis lands ``focal * theta``
pixels from the principal point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import as_vec
from .errors import GeometryError, InvalidInputError, NoIntersectionError, OutOfViewError

BALL_DIAMETER = 0.18  # m
BALL_RADIUS = BALL_DIAMETER / 2
FISHEYE_FOV = math.radians(210.0)

# camera-to-body rotations (columns are the camera axes expressed in the body frame)
FORWARD_MOUNT = np.array([[0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])
DOWNWARD_MOUNT = np.array([[0.0, -1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


@dataclass(frozen=True)
class CameraModel:
    focal: float = 200.0
    principal_point: np.ndarray = field(default_factory=lambda: np.array([400.0, 400.0]))
    mount_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    mount_orientation: np.ndarray = field(default_factory=lambda: np.eye(3))
    fov: float = FISHEYE_FOV

    def __post_init__(self):
        if not (self.focal > 0 and math.isfinite(self.focal)):
            raise InvalidInputError(f"focal must be positive, got {self.focal}")
        if not 0 < self.fov < 2 * math.pi:
            raise InvalidInputError(f"fov must lie in (0, 2pi), got {self.fov}")
        object.__setattr__(self, "principal_point", as_vec(self.principal_point, 2, "principal_point"))
        object.__setattr__(self, "mount_position", as_vec(self.mount_position, 3, "mount_position"))
        rot = np.asarray(self.mount_orientation, dtype=float)
        if rot.shape != (3, 3) or not np.allclose(rot @ rot.T, np.eye(3), atol=1e-9):
            raise InvalidInputError("mount_orientation must be a 3x3 rotation matrix")
        object.__setattr__(self, "mount_orientation", rot)


def forward_camera(**overrides) -> CameraModel:
    kw = dict(mount_position=np.array([0.28, 0.0, 0.0]), mount_orientation=FORWARD_MOUNT)
    kw.update(overrides)
    return CameraModel(**kw)


def downward_camera(**overrides) -> CameraModel:
    kw = dict(mount_position=np.array([0.10, 0.0, -0.06]), mount_orientation=DOWNWARD_MOUNT)
    kw.update(overrides)
    return CameraModel(**kw)


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    confidence: float = 1.0

    def __post_init__(self):
        vals = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInputError("box corners must be finite")
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidInputError(f"confidence must lie in [0, 1], got {self.confidence}")

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2])


def bbox_diameter(box: BoundingBox) -> float:
    """Apparent ball diameter in pixels: geometric mean of the box edges."""
    w = box.x_max - box.x_min
    h = box.y_max - box.y_min
    if w <= 0 or h <= 0:
        raise InvalidInputError(f"degenerate box {w}x{h}")
    return math.sqrt(w * h)


def viewing_angle_distance(box: BoundingBox, cam: CameraModel, ball_diameter: float = BALL_DIAMETER) -> float:
    """Camera-to-ball-centre distance from the angle the ball subtends."""
    dtheta = bbox_diameter(box) / cam.focal
    if not 0 < dtheta < math.pi:
        raise GeometryError(f"subtended angle {dtheta} outside (0, pi)")
    return ball_diameter / (2.0 * math.sin(dtheta / 2.0))


def pixel_to_ray(pixel, cam: CameraModel) -> np.ndarray:
    """Unit ray in the camera frame through ``pixel``."""
    off = as_vec(pixel, 2, "pixel") - cam.principal_point
    r = math.hypot(off[0], off[1])
    theta = r / cam.focal
    if theta > cam.fov / 2:
        raise OutOfViewError(f"pixel at {theta:.4f} rad is beyond half fov {cam.fov / 2:.4f}")
    if r == 0.0:
        return np.array([0.0, 0.0, 1.0])
    alpha = math.atan2(off[1], off[0])
    s = math.sin(theta)
    return np.array([s * math.cos(alpha), s * math.sin(alpha), math.cos(theta)])


def camera_to_body(point_cam, cam: CameraModel) -> np.ndarray:
    return cam.mount_orientation @ np.asarray(point_cam, float) + cam.mount_position


def body_to_camera(point_body, cam: CameraModel) -> np.ndarray:
    return cam.mount_orientation.T @ (np.asarray(point_body, float) - cam.mount_position)


def viewing_angle_position(box: BoundingBox, cam: CameraModel, ball_diameter: float = BALL_DIAMETER) -> np.ndarray:
    """Ball centre in the body frame (3-vector) from box size and box centre."""
    dist = viewing_angle_distance(box, cam, ball_diameter)
    return camera_to_body(dist * pixel_to_ray(box.center, cam), cam)


def projection_intersection(
    pixel, cam: CameraModel, body_height: float, ball_radius: float = BALL_RADIUS
) -> np.ndarray:
    """Horizontal ball position where the pixel ray meets the plane at ball-centre height."""
    direction = cam.mount_orientation @ pixel_to_ray(pixel, cam)
    origin = cam.mount_position
    plane_z = ball_radius - body_height
    if abs(direction[2]) < 1e-12:
        raise NoIntersectionError("ray is parallel to the ground plane")
    t = (plane_z - origin[2]) / direction[2]
    if t <= 0:
        raise NoIntersectionError("ray points away from the ground plane")
    hit = origin + t * direction
    return hit[:2].copy()


def synthetic_bbox(
    ball_center, cam: CameraModel, ball_diameter: float = BALL_DIAMETER, confidence: float = 1.0
) -> BoundingBox | None:
    """Ideal detection box for a ball centred at ``ball_center`` (body frame).

    The box is square, centred on the projection of the ball centre, with
    side equal to ``focal`` times the angle the ball subtends. Returns None
    when the centre falls outside the field of view.
    """
    c = body_to_camera(as_vec(ball_center, 3, "ball_center"), cam)
    dist = float(np.linalg.norm(c))
    if dist == 0.0:
        raise GeometryError("ball centre coincides with the camera centre")
    if dist <= ball_diameter / 2:
        raise GeometryError("camera centre lies inside the ball")
    theta = math.acos(max(-1.0, min(1.0, c[2] / dist)))
    if theta > cam.fov / 2:
        return None
    alpha = math.atan2(c[1], c[0])
    center = cam.principal_point + cam.focal * theta * np.array([math.cos(alpha), math.sin(alpha)])
    half = cam.focal * math.asin(ball_diameter / (2 * dist))
    return BoundingBox(center[0] - half, center[1] - half, center[0] + half, center[1] + half, confidence)
