import logging
from typing import Optional

import numpy as np

from arena.utils import Pose, build_world, sample_start_poses
from evolution.utils import (
    Individual,
    RunHistory,
    evaluate_population,
    generation_stats,
    init_population,
    next_generation,
)
from exceptions import ConfigError
from models import AppConfig
from streams import RandomStreams, Role

logger = logging.getLogger(__name__)


class EvolutionRun:
    """One evolution run at a fixed field of view.

    Randomness is keyed by (seed, generation, role, slot); the run is a pure
    function of (fov_deg, config, seed).
    """

    def __init__(self, config: AppConfig, fov_deg: float, seed: int):
        if not 0.0 <= fov_deg <= 180.0:
            raise ConfigError(f'fov_deg must be within [0, 180], got {fov_deg}')
        self.config = config
        self.fov_deg = float(fov_deg)
        self.seed = seed
        self.camera = config.camera.model_copy(update={'fov_deg': self.fov_deg})
        self.world = build_world(config.arena)
        self.streams = RandomStreams(seed)

    def start_poses(self, generation: int) -> list[Pose]:
        """Starts shared by every individual of a generation."""
        rng = self.streams.generator(generation, Role.START_POSES)
        return sample_start_poses(self.world, self.config.robot, self.config.trial.starts_per_trial, rng)

    def evaluate(self, population: list[Individual], start_poses: list[Pose]):
        genomes = np.stack([individual.genome for individual in population])
        fitness = evaluate_population(
            genomes,
            self.world,
            self.config.robot,
            self.camera,
            self.config.network,
            self.config.trial,
            start_poses,
        )
        for individual, value in zip(population, fitness):
            individual.score(value)

    def run(self, fixed_start_poses: Optional[list[Pose]] = None) -> RunHistory:
        evolution = self.config.evolution
        history = RunHistory(fov_deg=self.fov_deg, seed=self.seed)
        population = init_population(evolution, self.config.network, self.streams.child(0, Role.INIT))

        for generation in range(evolution.generations):
            starts = fixed_start_poses if fixed_start_poses is not None else self.start_poses(generation)
            self.evaluate(population, starts)
            stats = generation_stats(generation, population)
            history.stats.append(stats)
            logger.debug(
                f'fov={self.fov_deg:g} seed={self.seed} gen {generation}: '
                f'best={stats.best_fitness:.4f} mean={stats.mean_fitness:.4f}'
            )

            if generation + 1 < evolution.generations:
                genomes = next_generation(population, evolution, self.streams.child(generation, Role.BREED))
                population = [Individual(genome=genome) for genome in genomes]

        return history


def run_evolution(
    fov_deg: float,
    config: AppConfig,
    seed: int,
    fixed_start_poses: Optional[list[Pose]] = None,
) -> RunHistory:
    return EvolutionRun(config, fov_deg, seed).run(fixed_start_poses)
