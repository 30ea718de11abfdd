import numpy as np

from arena.utils import Pose, World, clearances, integrate_arcs, sample_start_poses, swept_clearances
from models import RobotSpec


class ArenaSim:
    """A built world plus the robot body moving in it; batched over positions."""

    def __init__(self, world: World, robot: RobotSpec):
        self.world = world
        self.robot = robot

    def move(self, x, y, heading, v_left, v_right, dt: float):
        return integrate_arcs(x, y, heading, v_left, v_right, dt, self.robot.axle_track)

    def clearance(self, x, y) -> np.ndarray:
        return clearances(self.world.segments, x, y, self.robot.body_radius)

    def swept_clearance(self, x0, y0, x1, y1) -> np.ndarray:
        return swept_clearances(self.world.segments, x0, y0, x1, y1, self.robot.body_radius)

    def start_poses(self, count: int, rng: np.random.Generator) -> list[Pose]:
        return sample_start_poses(self.world, self.robot, count, rng)
