# ============================================
# CONFIGURATION AND FILE SCHEMAS
# ============================================
# Every section of a config file maps to one model here.
# Unknown keys are rejected (extra='forbid') and models are frozen so a
# validated config can be shared by worker processes without copying.

from typing import Annotated, Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import (
    APP_VERSION,
    ARENA_HEIGHT,
    ARENA_WIDTH,
    AXLE_TRACK,
    BODY_RADIUS,
    CAMERA_FOV_DEG,
    CAMERA_MAX_RANGE,
    CAMERA_PIXELS,
    CROSSOVER_PROB,
    DEFAULT_SEED,
    ELITE_COUNT,
    FULL_FOVS,
    GENERATIONS,
    INIT_RANGE,
    MAX_WHEEL_SPEED,
    MUTATION_PROB,
    MUTATION_STD,
    NETWORK_HIDDEN,
    PARENT_COUNT,
    POPULATION_SIZE,
    REPLICATES,
    STARTS_PER_TRIAL,
    TRIAL_DT,
    TRIAL_STEPS,
    WEIGHT_LIMIT,
)

FovDeg = Annotated[float, Field(ge=0.0, le=180.0)]
Probability = Annotated[float, Field(ge=0.0, le=1.0)]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)


# ============================================
# ARENA
# ============================================
class WallSegment(StrictModel):
    x1: float
    y1: float
    x2: float
    y2: float

    @model_validator(mode='after')
    def check_length(self):
        if self.x1 == self.x2 and self.y1 == self.y2:
            raise ValueError('wall segment endpoints must differ')
        return self


class ArenaSpec(StrictModel):
    width: float = Field(ARENA_WIDTH, gt=0)
    height: float = Field(ARENA_HEIGHT, gt=0)
    extra_walls: tuple[WallSegment, ...] = ()

    @model_validator(mode='after')
    def check_walls_inside(self):
        for index, wall in enumerate(self.extra_walls):
            for x, y in ((wall.x1, wall.y1), (wall.x2, wall.y2)):
                if not (0.0 <= x <= self.width and 0.0 <= y <= self.height):
                    raise ValueError(f'extra_walls[{index}] leaves the {self.width}x{self.height} arena')
        return self


class RobotSpec(StrictModel):
    body_radius: float = Field(BODY_RADIUS, gt=0)
    axle_track: float = Field(AXLE_TRACK, gt=0)
    max_wheel_speed: float = Field(MAX_WHEEL_SPEED, gt=0)

    @model_validator(mode='after')
    def check_axle(self):
        if self.axle_track > 2 * self.body_radius:
            raise ValueError('axle_track must not exceed 2 * body_radius')
        return self


# ============================================
# SENSING AND CONTROL
# ============================================
class CameraSpec(StrictModel):
    fov_deg: FovDeg = CAMERA_FOV_DEG
    pixel_count: int = Field(CAMERA_PIXELS, ge=1)
    max_range: float = Field(CAMERA_MAX_RANGE, gt=0)


class NetworkSpec(StrictModel):
    n_inputs: int = Field(CAMERA_PIXELS, ge=1)
    n_hidden: int = Field(NETWORK_HIDDEN, ge=1)
    n_outputs: Literal[2] = 2


# ============================================
# EVOLUTION
# ============================================
class TrialConfig(StrictModel):
    steps: int = Field(TRIAL_STEPS, ge=1)
    dt: float = Field(TRIAL_DT, gt=0)
    starts_per_trial: int = Field(STARTS_PER_TRIAL, ge=1)


class EvolutionConfig(StrictModel):
    population_size: int = Field(POPULATION_SIZE, ge=2)
    generations: int = Field(GENERATIONS, ge=1)
    elite_count: int = Field(ELITE_COUNT, ge=0)
    parent_count: int = Field(PARENT_COUNT, ge=2)
    crossover_prob: Probability = CROSSOVER_PROB
    mutation_prob: Probability = MUTATION_PROB
    mutation_std: float = Field(MUTATION_STD, ge=0)
    init_range: float = Field(INIT_RANGE, ge=0, le=WEIGHT_LIMIT)

    @model_validator(mode='after')
    def check_counts(self):
        if not self.elite_count < self.parent_count <= self.population_size:
            raise ValueError(
                'need elite_count < parent_count <= population_size, got '
                f'{self.elite_count} / {self.parent_count} / {self.population_size}'
            )
        return self


class SweepConfig(StrictModel):
    fov_values: tuple[FovDeg, ...] = FULL_FOVS
    replicates: int = Field(REPLICATES, ge=1)
    base_seed: int = Field(DEFAULT_SEED, ge=0)

    @model_validator(mode='after')
    def check_grid(self):
        if not self.fov_values:
            raise ValueError('fov_values must not be empty')
        if any(b <= a for a, b in zip(self.fov_values, self.fov_values[1:])):
            raise ValueError('fov_values must be strictly increasing')
        return self


# ============================================
# APPLICATION CONFIG
# ============================================
class AppConfig(StrictModel):
    arena: ArenaSpec = Field(default_factory=ArenaSpec)
    robot: RobotSpec = Field(default_factory=RobotSpec)
    camera: CameraSpec = Field(default_factory=CameraSpec)
    network: NetworkSpec = Field(default_factory=NetworkSpec)
    trial: TrialConfig = Field(default_factory=TrialConfig)
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    @model_validator(mode='before')
    @classmethod
    def inputs_follow_camera(cls, data: Any):
        # network.n_inputs defaults to the camera's pixel count
        if isinstance(data, dict):
            camera = data.get('camera')
            network = data.get('network')
            if isinstance(camera, dict) and 'pixel_count' in camera:
                network = dict(network) if isinstance(network, dict) else {}
                network.setdefault('n_inputs', camera['pixel_count'])
                data = {**data, 'network': network}
        return data

    @model_validator(mode='after')
    def check_inputs(self):
        if self.network.n_inputs != self.camera.pixel_count:
            raise ValueError(
                f'network.n_inputs ({self.network.n_inputs}) must equal '
                f'camera.pixel_count ({self.camera.pixel_count})'
            )
        return self


# ============================================
# FILE FORMATS
# ============================================
class GenomeFile(BaseModel):
    model_config = ConfigDict(extra='forbid', allow_inf_nan=False)

    spec: NetworkSpec
    weights: list[float]
    fitness: Optional[float] = None
    fov_deg: Optional[FovDeg] = None

    @model_validator(mode='after')
    def check_length(self):
        from controller.utils import genome_length

        expected = genome_length(self.spec)
        if len(self.weights) != expected:
            raise ValueError(f'weights has {len(self.weights)} values, spec needs {expected}')
        return self


class RunManifest(BaseModel):
    command: str
    version: str = APP_VERSION
    base_seed: int
    timestamp: str
    config: dict[str, Any]
    details: dict[str, Any] = Field(default_factory=dict)

    def __repr__(self):
        return f'<RunManifest(command={self.command}, seed={self.base_seed}, at={self.timestamp})>'
