import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dribblekit.errors import GeometryError, InvalidInputError, NoIntersectionError, OutOfViewError
from dribblekit.perception import (
    BALL_DIAMETER,
    BoundingBox,
    CameraModel,
    bbox_diameter,
    body_to_camera,
    camera_to_body,
    downward_camera,
    forward_camera,
    pixel_to_ray,
    projection_intersection,
    synthetic_bbox,
    viewing_angle_distance,
    viewing_angle_position,
)

CAM = CameraModel()  # at the body origin, optical axis along body +z (up)


def test_bbox_diameter_examples():
    assert bbox_diameter(BoundingBox(0, 0, 40, 40)) == 40
    assert bbox_diameter(BoundingBox(100, 100, 140, 130)) == pytest.approx(math.sqrt(1200), abs=1e-12)
    with pytest.raises(InvalidInputError):
        bbox_diameter(BoundingBox(10, 10, 10, 20))


def test_viewing_angle_distance_examples():
    box = BoundingBox(382, 382, 418, 418)
    assert viewing_angle_distance(box, CAM) == pytest.approx(0.09 / math.sin(0.09), abs=1e-12)
    assert viewing_angle_distance(box, CAM) == pytest.approx(1.00135, abs=1e-5)
    for dd in (1.0, 5.0, 9.9):  # dd / focal < 0.05
        d = viewing_angle_distance(BoundingBox(0, 0, dd, dd), CAM)
        assert d == pytest.approx(200 * BALL_DIAMETER / dd, rel=1e-3)
    with pytest.raises(GeometryError):
        viewing_angle_distance(BoundingBox(0, 0, 200 * math.pi, 200 * math.pi), CAM)


def test_viewing_angle_distance_strictly_decreasing():
    ds = [viewing_angle_distance(BoundingBox(0, 0, w, w), CAM) for w in np.linspace(2, 600, 300)]
    assert np.all(np.diff(ds) < 0)


def test_pixel_to_ray_examples():
    assert np.array_equal(pixel_to_ray((400, 400), CAM), [0, 0, 1])
    rx = pixel_to_ray((500, 400), CAM)
    assert np.allclose(rx, [math.sin(0.5), 0, math.cos(0.5)], atol=1e-15)
    ry = pixel_to_ray((400, 500), CAM)
    assert np.allclose(ry, [0, math.sin(0.5), math.cos(0.5)], atol=1e-15)
    with pytest.raises(OutOfViewError):
        pixel_to_ray((400 + 200 * 1.9, 400), CAM)  # 1.9 rad > 105 deg


def test_projection_intersection_examples():
    down = CameraModel(mount_orientation=np.diag([1.0, -1.0, -1.0]))
    assert np.allclose(projection_intersection((400, 400), down, 0.3), [0, 0], atol=1e-15)
    # pitch 45 deg below the horizontal, looking forward
    c = math.sqrt(0.5)
    cam = CameraModel(mount_orientation=np.array([[0, -c, c], [-1, 0, 0], [0, -c, -c]]))
    got = projection_intersection((400, 400), cam, 0.3, 0.09)
    assert np.allclose(got, [0.21, 0.0], atol=1e-12)
    with pytest.raises(NoIntersectionError):
        projection_intersection((400, 400), CAM, 0.3)  # identity mount looks straight up
    with pytest.raises(NoIntersectionError):
        projection_intersection((400, 400), forward_camera(), 0.3)  # axis parallel to the ground


def test_synthetic_bbox_examples():
    box = synthetic_bbox((0, 0, 2.0), CAM)
    assert np.allclose(box.center, CAM.principal_point, atol=1e-12)
    assert viewing_angle_distance(box, CAM) == pytest.approx(2.0, abs=1e-9)
    assert synthetic_bbox((0, 0, -2.0), CAM) is None
    with pytest.raises(GeometryError):
        synthetic_bbox((0, 0, 0), CAM)


def test_mount_transforms_invert():
    cam = downward_camera()
    p = np.array([0.4, -0.2, -0.21])
    assert np.allclose(camera_to_body(body_to_camera(p, cam), cam), p, atol=1e-15)


def random_pose(rng, cam, max_polar=math.radians(100)):
    """A ball centre at 0.3-5 m from ``cam`` within ``max_polar`` of its axis, in the body frame."""
    d = rng.uniform(0.3, 5.0)
    theta = rng.uniform(0, max_polar)
    alpha = rng.uniform(-math.pi, math.pi)
    ray = np.array([math.sin(theta) * math.cos(alpha), math.sin(theta) * math.sin(alpha), math.cos(theta)])
    return camera_to_body(d * ray, cam), d


@pytest.mark.parametrize("cam", [CAM, forward_camera(), downward_camera()], ids=["axis", "forward", "downward"])
def test_round_trip_1000_poses(cam):
    rng = np.random.default_rng(11)
    for _ in range(1000):
        center, d = random_pose(rng, cam)
        box = synthetic_bbox(center, cam)
        assert abs(viewing_angle_distance(box, cam) - d) < 1e-9
        assert np.max(np.abs(viewing_angle_position(box, cam) - center)) < 1e-6


def test_models_agree_for_balls_on_the_ground():
    rng = np.random.default_rng(12)
    height = 0.3
    checked = 0
    for cam in (forward_camera(), downward_camera()):
        for _ in range(1000):
            xy = rng.uniform(-2, 3, 2)
            center = np.array([xy[0], xy[1], BALL_DIAMETER / 2 - height])
            if np.linalg.norm(body_to_camera(center, cam)) < 0.3:
                continue
            box = synthetic_bbox(center, cam)
            if box is None:
                continue
            try:
                pi = projection_intersection(box.center, cam, height)
            except NoIntersectionError:
                continue  # grazing rays above the horizon of the ball-centre plane
            va = viewing_angle_position(box, cam)[:2]
            assert np.max(np.abs(va - pi)) < 1e-6
            assert np.max(np.abs(va - xy)) < 1e-6
            checked += 1
    assert checked > 1000


@settings(max_examples=200, deadline=None)
@given(w=st.floats(1, 500), h=st.floats(1, 500))
def test_bbox_diameter_is_geometric_mean(w, h):
    d = bbox_diameter(BoundingBox(10, 20, 10 + w, 20 + h))
    assert min(w, h) * (1 - 1e-12) <= d <= max(w, h) * (1 + 1e-12)
