import numpy as np

from arena.utils import World
from models import CameraSpec
from vision.utils import pixel_offsets, render_readings


class LinearCamera:
    """One row of depth-like pixels spread across the field of view."""

    def __init__(self, world: World, spec: CameraSpec):
        self.world = world
        self.spec = spec
        self.offsets = pixel_offsets(spec)

    def render(self, x, y, heading) -> np.ndarray:
        return render_readings(self.world, x, y, heading, self.offsets, self.spec.max_range)
