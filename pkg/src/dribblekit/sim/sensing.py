"""Synthetic two-camera perception feeding the ball filter.

Each control step every camera delivers a frame with probability
``arrival_rate``. A frame yields a noisy detection box; the box is turned
into two position readings (viewing-angle and projection-intersection
models). The velocity slot stands in for a learned velocity estimator: the
true ball velocity plus Gaussian noise, available every step. Readings are
mapped to the world frame with the true body pose, i.e. odometry is assumed
perfect.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import ball_filter as bf
from ..errors import GeometryError
from ..perception import (
    BALL_DIAMETER,
    BoundingBox,
    CameraModel,
    downward_camera,
    forward_camera,
    projection_intersection,
    synthetic_bbox,
    viewing_angle_position,
)

DEFAULT_VELOCITY_NOISE = 0.05  # m/s


@dataclass
class SyntheticCameras:
    rng: np.random.Generator
    arrival_rate: float = 0.5
    pixel_noise: float = 1.0
    velocity_noise: float = DEFAULT_VELOCITY_NOISE
    body_height: float = 0.30
    ball_diameter: float = BALL_DIAMETER
    cams: tuple[CameraModel, CameraModel] = field(default_factory=lambda: (forward_camera(), downward_camera()))

    def boxes(self, ball_xy, robot_xy, yaw: float) -> list[BoundingBox | None]:
        """Noisy boxes for this step; None where no frame arrived or the ball is out of view."""
        c, s = math.cos(yaw), math.sin(yaw)
        dx, dy = ball_xy[0] - robot_xy[0], ball_xy[1] - robot_xy[1]
        centre = np.array([c * dx + s * dy, -s * dx + c * dy, self.ball_diameter / 2 - self.body_height])
        out: list[BoundingBox | None] = []
        for cam in self.cams:
            # draw both numbers every step so the stream does not depend on geometry
            arrived = self.rng.random() < self.arrival_rate
            noise = self.rng.normal(0.0, 1.0, 4) * self.pixel_noise
            if not arrived:
                out.append(None)
                continue
            try:
                box = synthetic_bbox(centre, cam, self.ball_diameter)
            except GeometryError:
                box = None
            if box is not None:
                box = BoundingBox(box.x_min + noise[0], box.y_min + noise[1],
                                  box.x_max + noise[2], box.y_max + noise[3], box.confidence)
            out.append(box)
        return out

    def measure(self, ball_xy, ball_vel, robot_xy, yaw: float) -> tuple[bf.MeasurementSet, list]:
        boxes = self.boxes(ball_xy, robot_xy, yaw)
        c, s = math.cos(yaw), math.sin(yaw)

        def to_world(rel):
            return np.array([robot_xy[0] + c * rel[0] - s * rel[1], robot_xy[1] + s * rel[0] + c * rel[1]])

        angle: list = [None, None]
        centre: list = [None, None]
        for k, (box, cam) in enumerate(zip(boxes, self.cams)):
            if box is None:
                continue
            try:
                angle[k] = to_world(viewing_angle_position(box, cam, self.ball_diameter)[:2])
            except (GeometryError, ValueError):
                pass
            try:
                centre[k] = to_world(projection_intersection(box.center, cam, self.body_height, self.ball_diameter / 2))
            except GeometryError:
                pass
        vel = np.asarray(ball_vel, float) + self.rng.normal(0.0, 1.0, 2) * self.velocity_noise
        meas = bf.MeasurementSet(angle[0], angle[1], centre[0], centre[1], vel)
        return meas, boxes
