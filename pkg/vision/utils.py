import math
from dataclasses import dataclass

import numpy as np

from arena.utils import Pose, World, cast_rays, inside_arena
from exceptions import DomainError
from models import CameraSpec


@dataclass(frozen=True, eq=False)
class CameraImage:
    readings: np.ndarray

    def __len__(self):
        return len(self.readings)


def pixel_offsets(camera: CameraSpec) -> np.ndarray:
    """Pixel ray directions relative to the heading, both FOV edges included."""
    if camera.pixel_count == 1 or camera.fov_deg == 0:
        return np.zeros(camera.pixel_count)
    fov = math.radians(camera.fov_deg)
    step = fov / (camera.pixel_count - 1)
    return -fov / 2 + step * np.arange(camera.pixel_count)


def pixel_angles(camera: CameraSpec, heading: float) -> np.ndarray:
    return heading + pixel_offsets(camera)


def readings_from_distances(distances: np.ndarray, max_range: float) -> np.ndarray:
    """Near walls read close to 1, walls at or beyond max_range read 0."""
    return np.clip(1.0 - distances / max_range, 0.0, 1.0)


def render_readings(world: World, x, y, heading, offsets: np.ndarray, max_range: float) -> np.ndarray:
    """Batched rendering: x, y, heading of shape (P,) give readings of shape (P, pixels)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    angles = np.asarray(heading, dtype=float)[..., None] + offsets
    distances = cast_rays(world.segments, x[..., None], y[..., None], angles)
    return readings_from_distances(distances, max_range)


def render_camera(world: World, pose: Pose, camera: CameraSpec) -> CameraImage:
    if not inside_arena(world, pose.x, pose.y):
        raise DomainError(f'camera pose ({pose.x}, {pose.y}) is not strictly inside the arena')
    readings = render_readings(world, pose.x, pose.y, pose.heading, pixel_offsets(camera), camera.max_range)
    return CameraImage(readings=readings)
