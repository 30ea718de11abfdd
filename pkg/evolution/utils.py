import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from arena.arena import ArenaSim
from arena.utils import Pose, World
from config import PROXIMITY_RADII, WEIGHT_LIMIT
from controller.network import RecurrentController
from controller.utils import genome_length
from exceptions import HarnessError
from models import CameraSpec, EvolutionConfig, NetworkSpec, RobotSpec, TrialConfig
from streams import RandomStreams
from vision.camera import LinearCamera

logger = logging.getLogger(__name__)


# ============================================
# RECORDS
# ============================================
@dataclass
class Individual:
    genome: np.ndarray
    fitness: Optional[float] = None

    def score(self, value: float):
        if not 0.0 <= value <= 1.0:
            raise HarnessError(f'fitness {value} outside [0, 1]')
        self.fitness = float(value)


@dataclass(frozen=True, eq=False)
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_genome: np.ndarray


@dataclass
class RunHistory:
    fov_deg: float
    seed: int
    stats: list[GenerationStats] = field(default_factory=list)

    def best_series(self) -> np.ndarray:
        return np.array([s.best_fitness for s in self.stats])

    def mean_series(self) -> np.ndarray:
        return np.array([s.mean_fitness for s in self.stats])


@dataclass(frozen=True, eq=False)
class StepRecord:
    step: int
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    v_left: np.ndarray
    v_right: np.ndarray
    phi: np.ndarray
    collision: np.ndarray   # frozen by a collision at or before this step


# ============================================
# FITNESS
# ============================================
def fitness_step(v_left, v_right, clearance_value, spec: RobotSpec):
    """V * (1 - sqrt(dv)) * (1 - i): fast, straight, and away from walls."""
    top = 2.0 * spec.max_wheel_speed
    speed = (np.abs(v_left) + np.abs(v_right)) / top
    turning = np.abs(v_left - v_right) / top
    proximity = np.clip(1.0 - clearance_value / (PROXIMITY_RADII * spec.body_radius), 0.0, 1.0)
    phi = speed * (1.0 - np.sqrt(turning)) * (1.0 - proximity)
    return float(phi) if np.ndim(phi) == 0 else phi


def rollout(
    controller: RecurrentController,
    sim: ArenaSim,
    camera: LinearCamera,
    start: Pose,
    steps: int,
    dt: float,
) -> Iterator[StepRecord]:
    """Closed loop camera -> network -> wheels -> kinematics for every genome row.

    A step whose path brings the body into contact with a wall is not taken:
    the robot stays at its last clear pose and scores 0 from that step on.
    """
    batch = controller.batch
    x = np.full(batch, start.x)
    y = np.full(batch, start.y)
    heading = np.full(batch, start.heading)
    alive = np.ones(batch, dtype=bool)
    controller.reset()

    for step in range(steps):
        readings = camera.render(x, y, heading)
        v_left, v_right = controller.act(readings)
        new_x, new_y, new_heading = sim.move(x, y, heading, v_left, v_right, dt)
        gap = sim.clearance(new_x, new_y)
        hit = sim.swept_clearance(x, y, new_x, new_y) <= 0.0
        moving = alive & ~hit

        phi = np.where(moving, fitness_step(v_left, v_right, gap, sim.robot), 0.0)
        x = np.where(moving, new_x, x)
        y = np.where(moving, new_y, y)
        heading = np.where(moving, new_heading, heading)
        v_left = np.where(alive, v_left, 0.0)
        v_right = np.where(alive, v_right, 0.0)
        alive = moving
        yield StepRecord(step, x, y, heading, v_left, v_right, phi, ~alive)


def _check_starts(world: World, robot: RobotSpec, trial: TrialConfig, start_poses: list[Pose]) -> ArenaSim:
    if len(start_poses) != trial.starts_per_trial:
        raise HarnessError(f'expected {trial.starts_per_trial} start poses, got {len(start_poses)}')
    sim = ArenaSim(world, robot)
    for pose in start_poses:
        if sim.clearance(pose.x, pose.y) <= 0.0:
            raise HarnessError(f'start pose {tuple(pose)} collides with a wall')
    return sim


def evaluate_population(
    genomes: np.ndarray,
    world: World,
    robot: RobotSpec,
    camera: CameraSpec,
    network: NetworkSpec,
    trial: TrialConfig,
    start_poses: list[Pose],
) -> np.ndarray:
    """Fitness of each genome row: mean over starts of the mean per-step phi."""
    sim = _check_starts(world, robot, trial, start_poses)
    eye = LinearCamera(world, camera)
    controller = RecurrentController(np.atleast_2d(genomes), network, robot)

    per_start = []
    for start in start_poses:
        total = np.zeros(controller.batch)
        for record in rollout(controller, sim, eye, start, trial.steps, trial.dt):
            total = total + record.phi
        per_start.append(total / trial.steps)
    return sum(per_start) / len(per_start)


def evaluate_individual(
    genome: np.ndarray,
    world: World,
    robot: RobotSpec,
    camera: CameraSpec,
    network: NetworkSpec,
    trial: TrialConfig,
    start_poses: list[Pose],
) -> float:
    return float(evaluate_population(np.asarray(genome)[None, :], world, robot, camera, network, trial, start_poses)[0])


def simulate_trajectory(
    genome: np.ndarray,
    world: World,
    robot: RobotSpec,
    camera: CameraSpec,
    network: NetworkSpec,
    steps: int,
    dt: float,
    start: Pose,
) -> list[StepRecord]:
    """Per-step records of a single genome from a single start, scalars unwrapped."""
    trial = TrialConfig(steps=steps, dt=dt, starts_per_trial=1)
    sim = _check_starts(world, robot, trial, [start])
    controller = RecurrentController(np.asarray(genome)[None, :], network, robot)
    return [
        StepRecord(
            step=r.step,
            x=r.x[0], y=r.y[0], heading=r.heading[0],
            v_left=r.v_left[0], v_right=r.v_right[0],
            phi=r.phi[0], collision=r.collision[0],
        )
        for r in rollout(controller, sim, LinearCamera(world, camera), start, steps, dt)
    ]


# ============================================
# GENETIC OPERATORS
# ============================================
def init_population(config: EvolutionConfig, spec: NetworkSpec, streams: RandomStreams) -> list[Individual]:
    """Genes i.i.d. uniform in [-init_range, +init_range]; individual i draws from stream i."""
    length = genome_length(spec)
    bound = config.init_range
    return [
        Individual(genome=streams.generator(index).uniform(-bound, bound, size=length))
        for index in range(config.population_size)
    ]


def rank(population: list[Individual]) -> list[int]:
    """Indices by fitness descending; ties go to the lower index."""
    for index, individual in enumerate(population):
        if individual.fitness is None:
            raise HarnessError(f'individual {index} has not been evaluated')
    return sorted(range(len(population)), key=lambda i: (-population[i].fitness, i))


def mutate(genome: np.ndarray, config: EvolutionConfig, rng: np.random.Generator) -> np.ndarray:
    mask = rng.random(genome.shape[0]) < config.mutation_prob
    noise = rng.normal(0.0, config.mutation_std, size=genome.shape[0])
    return np.clip(genome + np.where(mask, noise, 0.0), -WEIGHT_LIMIT, WEIGHT_LIMIT)


def next_generation(population: list[Individual], config: EvolutionConfig, streams: RandomStreams) -> list[np.ndarray]:
    """Elitism + truncation selection + one-point crossover + Gaussian mutation.

    Offspring slot k draws only from stream k.
    """
    order = rank(population)
    elites = [population[i].genome.copy() for i in order[:config.elite_count]]
    parents = [population[i].genome for i in order[:config.parent_count]]
    length = parents[0].shape[0]

    offspring = list(elites)
    for slot in range(len(elites), config.population_size):
        rng = streams.generator(slot)
        first, second = rng.choice(len(parents), size=2, replace=False)
        if rng.random() < config.crossover_prob and length > 1:
            cut = rng.integers(1, length)
            child = np.concatenate([parents[first][:cut], parents[second][cut:]])
        else:
            child = parents[first].copy()
        offspring.append(mutate(child, config, rng))
    return offspring


def generation_stats(generation: int, population: list[Individual]) -> GenerationStats:
    order = rank(population)
    best = population[order[0]]
    fitness = np.array([individual.fitness for individual in population])
    return GenerationStats(
        generation=generation,
        best_fitness=best.fitness,
        mean_fitness=min(float(fitness.mean()), best.fitness),
        best_genome=best.genome.copy(),
    )
