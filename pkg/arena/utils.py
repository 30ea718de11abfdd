import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from pydantic import ValidationError

from config import START_CLEARANCE_RADII, START_POSE_ATTEMPTS, STRAIGHT_LINE_OMEGA
from exceptions import ConfigError, DomainError, HarnessError
from models import ArenaSpec, RobotSpec, WallSegment

EDGE_EPS = 1e-12


class Pose(NamedTuple):
    x: float
    y: float
    heading: float


@dataclass(frozen=True, eq=False)
class World:
    """Immutable wall set. `segments` is the (M, 4) array [x1, y1, x2, y2] of `walls`."""
    arena: ArenaSpec
    walls: tuple[WallSegment, ...]
    segments: np.ndarray

    def __repr__(self):
        return f'<World({self.arena.width}x{self.arena.height}, walls={len(self.walls)})>'


def build_world(arena: ArenaSpec) -> World:
    """Boundary rectangle (0,0)-(w,0)-(w,h)-(0,h) first, then extra walls in input order."""
    try:
        arena = ArenaSpec.model_validate(arena.model_dump())
    except ValidationError as exc:
        raise ConfigError(f'invalid arena: {exc.errors()[0]["msg"]}') from exc

    w, h = arena.width, arena.height
    boundary = (
        WallSegment(x1=0.0, y1=0.0, x2=w, y2=0.0),
        WallSegment(x1=w, y1=0.0, x2=w, y2=h),
        WallSegment(x1=w, y1=h, x2=0.0, y2=h),
        WallSegment(x1=0.0, y1=h, x2=0.0, y2=0.0),
    )
    walls = boundary + tuple(arena.extra_walls)
    segments = np.array([[s.x1, s.y1, s.x2, s.y2] for s in walls], dtype=float)
    segments.setflags(write=False)
    return World(arena=arena, walls=walls, segments=segments)


def inside_arena(world: World, x: float, y: float) -> bool:
    return 0.0 < x < world.arena.width and 0.0 < y < world.arena.height


def wrap_angle(angle):
    """Map to [-pi, pi); values already in range are returned untouched."""
    angle = np.asarray(angle, dtype=float)
    in_range = (angle >= -math.pi) & (angle < math.pi)
    wrapped = np.mod(angle + math.pi, 2 * math.pi) - math.pi
    # np.mod can round up to exactly 2*pi
    wrapped = np.where(wrapped >= math.pi, wrapped - 2 * math.pi, wrapped)
    return np.where(in_range, angle, wrapped)


# ============================================
# RAY CASTING
# ============================================
def cast_rays(segments: np.ndarray, ox, oy, angles) -> np.ndarray:
    """Distance along each ray to the nearest wall, inf if nothing is hit.

    `ox`/`oy` must broadcast against `angles`; walls are the last axis of the
    intermediate arrays, so one row of rays never mixes with another.
    """
    angles = np.asarray(angles, dtype=float)
    dx = np.cos(angles)[..., None]
    dy = np.sin(angles)[..., None]
    ox = np.asarray(ox, dtype=float)[..., None]
    oy = np.asarray(oy, dtype=float)[..., None]

    x1, y1, x2, y2 = segments[:, 0], segments[:, 1], segments[:, 2], segments[:, 3]
    ex, ey = x2 - x1, y2 - y1
    wx, wy = x1 - ox, y1 - oy

    # origin + t*d = p1 + u*e, solved with 2D cross products
    denom = dx * ey - dy * ex
    with np.errstate(divide='ignore', invalid='ignore'):
        t = (wx * ey - wy * ex) / denom
        u = (wx * dy - wy * dx) / denom
    hit = (denom != 0.0) & (t > 0.0) & (u >= -EDGE_EPS) & (u <= 1.0 + EDGE_EPS)
    return np.where(hit, t, np.inf).min(axis=-1)


def cast_ray(world: World, origin: tuple[float, float], angle: float) -> float:
    x, y = origin
    if not inside_arena(world, x, y):
        raise DomainError(f'ray origin ({x}, {y}) is not strictly inside the arena')
    return float(cast_rays(world.segments, x, y, angle))


# ============================================
# KINEMATICS
# ============================================
def integrate_arcs(x, y, heading, v_left, v_right, dt: float, axle_track: float):
    """Exact differential-drive update for constant wheel speeds over dt (array form)."""
    v = (v_left + v_right) / 2.0
    omega = (v_right - v_left) / axle_track
    straight = np.abs(omega) < STRAIGHT_LINE_OMEGA

    turned = heading + omega * dt
    radius = v / np.where(straight, 1.0, omega)
    arc_x = x + radius * (np.sin(turned) - np.sin(heading))
    arc_y = y - radius * (np.cos(turned) - np.cos(heading))
    line_x = x + v * dt * np.cos(heading)
    line_y = y + v * dt * np.sin(heading)

    new_x = np.where(straight, line_x, arc_x)
    new_y = np.where(straight, line_y, arc_y)
    new_heading = wrap_angle(np.where(straight, heading, turned))
    return new_x, new_y, new_heading


def step_kinematics(pose: Pose, v_left: float, v_right: float, dt: float, spec: RobotSpec) -> Pose:
    limit = spec.max_wheel_speed
    if abs(v_left) > limit or abs(v_right) > limit:
        raise DomainError(f'wheel speeds ({v_left}, {v_right}) exceed max_wheel_speed {limit}')
    if dt <= 0:
        raise DomainError(f'dt must be positive, got {dt}')

    x, y, heading = integrate_arcs(pose.x, pose.y, pose.heading, v_left, v_right, dt, spec.axle_track)
    return Pose(float(x), float(y), float(heading))


# ============================================
# CLEARANCE AND COLLISION
# ============================================
def _segment_distances(segments: np.ndarray, x, y) -> np.ndarray:
    """Point-to-segment distance for every wall; walls are the last axis."""
    x = np.asarray(x, dtype=float)[..., None]
    y = np.asarray(y, dtype=float)[..., None]

    x1, y1, x2, y2 = segments[:, 0], segments[:, 1], segments[:, 2], segments[:, 3]
    ex, ey = x2 - x1, y2 - y1
    s = np.clip(((x - x1) * ex + (y - y1) * ey) / (ex * ex + ey * ey), 0.0, 1.0)
    return np.hypot(x - (x1 + s * ex), y - (y1 + s * ey))


def clearances(segments: np.ndarray, x, y, body_radius: float) -> np.ndarray:
    """Distance from body circle to nearest wall per position; negative when penetrating."""
    return _segment_distances(segments, x, y).min(axis=-1) - body_radius


def swept_clearances(segments: np.ndarray, x0, y0, x1, y1, body_radius: float) -> np.ndarray:
    """Clearance along the straight path from (x0, y0) to (x1, y1).

    Zero distance when the path crosses a wall, so a long step cannot carry
    the body through it.
    """
    x0, y0, x1, y1 = (np.asarray(v, dtype=float) for v in (x0, y0, x1, y1))
    px, py = x0[..., None], y0[..., None]
    dx, dy = (x1 - x0)[..., None], (y1 - y0)[..., None]

    ax, ay, bx, by = segments[:, 0], segments[:, 1], segments[:, 2], segments[:, 3]
    ex, ey = bx - ax, by - ay
    # strict sign changes on both segments: a proper crossing
    side_a = dx * (ay - py) - dy * (ax - px)
    side_b = dx * (by - py) - dy * (bx - px)
    side_p = ex * (py - ay) - ey * (px - ax)
    side_q = ex * (py + dy - ay) - ey * (px + dx - ax)
    crossed = (side_a * side_b < 0.0) & (side_p * side_q < 0.0)

    length_sq = dx * dx + dy * dy
    with np.errstate(divide='ignore', invalid='ignore'):
        s_a = np.clip(np.where(length_sq > 0.0, ((ax - px) * dx + (ay - py) * dy) / length_sq, 0.0), 0.0, 1.0)
        s_b = np.clip(np.where(length_sq > 0.0, ((bx - px) * dx + (by - py) * dy) / length_sq, 0.0), 0.0, 1.0)
    corner_a = np.hypot(ax - (px + s_a * dx), ay - (py + s_a * dy))
    corner_b = np.hypot(bx - (px + s_b * dx), by - (py + s_b * dy))

    distance = np.minimum.reduce([
        _segment_distances(segments, x0, y0),
        _segment_distances(segments, x1, y1),
        corner_a,
        corner_b,
    ])
    return np.where(crossed, 0.0, distance).min(axis=-1) - body_radius


def clearance(world: World, pose: Pose, spec: RobotSpec) -> float:
    return float(clearances(world.segments, pose.x, pose.y, spec.body_radius))


def detect_collision(world: World, pose: Pose, spec: RobotSpec) -> bool:
    return clearance(world, pose, spec) <= 0.0


def sample_start_poses(world: World, spec: RobotSpec, count: int, rng: np.random.Generator) -> list[Pose]:
    """Uniform poses whose clearance is at least START_CLEARANCE_RADII body radii."""
    poses = []
    margin = START_CLEARANCE_RADII * spec.body_radius
    reach = margin + spec.body_radius
    for _ in range(START_POSE_ATTEMPTS):
        if len(poses) == count:
            break
        x = rng.uniform(reach, max(reach, world.arena.width - reach))
        y = rng.uniform(reach, max(reach, world.arena.height - reach))
        heading = rng.uniform(-math.pi, math.pi)
        if inside_arena(world, x, y) and clearances(world.segments, x, y, spec.body_radius) >= margin:
            poses.append(Pose(float(x), float(y), float(heading)))
    if len(poses) < count:
        raise HarnessError(f'could not place {count} collision-free start poses in {START_POSE_ATTEMPTS} attempts')
    return poses
