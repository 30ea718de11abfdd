import math

import numpy as np
import pytest
from pydantic import ValidationError

from arena.utils import Pose, build_world, clearance, inside_arena, sample_start_poses, step_kinematics
from controller.utils import decode_genome, genome_length, initial_state, network_step, outputs_to_wheel_speeds
from evolution.evolution import EvolutionRun, run_evolution
from evolution.utils import (
    Individual,
    evaluate_individual,
    evaluate_population,
    fitness_step,
    generation_stats,
    init_population,
    mutate,
    next_generation,
    rank,
    simulate_trajectory,
)
from exceptions import ConfigError, HarnessError
from models import AppConfig, ArenaSpec, CameraSpec, EvolutionConfig, NetworkSpec, RobotSpec, TrialConfig, WallSegment
from streams import RandomStreams, Role
from vision.utils import render_camera

NETWORK = NetworkSpec()
CAMERA = CameraSpec()


def scalar_fitness(genome, world, robot, camera, network, trial, starts) -> float:
    """One robot, one step at a time, plain floats."""
    params = decode_genome(genome, network)
    per_start = []
    for start in starts:
        pose, state, total = start, initial_state(network), 0.0
        for _ in range(trial.steps):
            outputs, state = network_step(params, state, render_camera(world, pose, camera))
            v_left, v_right = (float(v) for v in outputs_to_wheel_speeds(outputs, robot))
            pose = step_kinematics(pose, v_left, v_right, trial.dt, robot)
            gap = clearance(world, pose, robot)
            if gap <= 0.0 or not inside_arena(world, pose.x, pose.y):
                break
            total += fitness_step(v_left, v_right, gap, robot)
        per_start.append(total / trial.steps)
    return sum(per_start) / len(per_start)


def forward_genome(bias: float = 4.0) -> np.ndarray:
    genome = np.zeros(genome_length(NETWORK))
    genome[-2:] = bias
    return genome


def evaluated(genomes, fitness) -> list[Individual]:
    population = [Individual(genome=np.asarray(g, dtype=float)) for g in genomes]
    for individual, value in zip(population, fitness):
        individual.score(value)
    return population


# ============================================
# FITNESS
# ============================================
def test_perfect_step(robot):
    assert fitness_step(0.08, 0.08, 0.2, robot) == 1.0


def test_standing_still_scores_zero(robot):
    assert fitness_step(0.0, 0.0, 0.3, robot) == 0.0


def test_spinning_scores_zero(robot):
    assert fitness_step(-0.08, 0.08, 0.3, robot) == 0.0


def test_walls_reduce_the_score(robot):
    assert fitness_step(0.08, 0.08, 0.05, robot) == pytest.approx(0.05 / (4 * robot.body_radius))
    assert fitness_step(0.08, 0.08, -0.01, robot) == 0.0


def test_fitness_step_range(robot, rng):
    v_left = rng.uniform(-0.08, 0.08, size=100_000)
    v_right = rng.uniform(-0.08, 0.08, size=100_000)
    gaps = rng.uniform(-0.05, 1.0, size=100_000)
    phi = fitness_step(v_left, v_right, gaps, robot)
    assert np.all((phi >= 0.0) & (phi <= 1.0))


# ============================================
# EVALUATION
# ============================================
def test_zero_genome_scores_exactly_zero(world, robot, rng):
    starts = sample_start_poses(world, robot, 2, rng)
    fitness = evaluate_individual(np.zeros(218), world, robot, CAMERA, NETWORK, TrialConfig(steps=50), starts)
    assert fitness == 0.0


def test_blind_forward_robot_hits_the_wall(world, robot):
    trial = TrialConfig(steps=400, starts_per_trial=1)
    start = Pose(0.9, 0.5, 0.0)
    fitness = evaluate_individual(forward_genome(), world, robot, CAMERA, NETWORK, trial, [start])
    assert 0.0 < fitness < 13 / 400

    records = simulate_trajectory(forward_genome(), world, robot, CAMERA, NETWORK, 400, 0.1, start)
    assert records[12].collision
    assert records[-1].x == records[13].x
    assert all(r.phi == 0.0 for r in records[13:])


def test_long_steps_cannot_pass_through_a_wall(world, robot):
    start = Pose(0.96, 0.5, 0.0)
    records = simulate_trajectory(forward_genome(), world, robot, CAMERA, NETWORK, 20, 1.0, start)
    assert records[0].collision
    assert all(r.x == start.x and r.phi == 0.0 for r in records)

    trial = TrialConfig(steps=20, dt=1.0, starts_per_trial=1)
    assert evaluate_individual(forward_genome(), world, robot, CAMERA, NETWORK, trial, [start]) == 0.0


def test_long_steps_stop_at_an_interior_wall(robot):
    world = build_world(ArenaSpec(extra_walls=(WallSegment(x1=0.6, y1=0.2, x2=0.6, y2=0.8),)))
    records = simulate_trajectory(forward_genome(), world, robot, CAMERA, NETWORK, 10, 1.0, Pose(0.45, 0.5, 0.0))
    assert all(r.x < 0.6 for r in records)
    assert records[-1].collision


def test_evaluation_matches_scalar_loop(world, robot, rng):
    trial = TrialConfig(steps=100, starts_per_trial=2)
    starts = sample_start_poses(world, robot, 2, rng)
    for _ in range(5):
        genome = rng.uniform(-1, 1, size=218)
        fast = evaluate_individual(genome, world, robot, CAMERA, NETWORK, trial, starts)
        assert abs(fast - scalar_fitness(genome, world, robot, CAMERA, NETWORK, trial, starts)) <= 1e-12
        assert 0.0 <= fast <= 1.0


def test_population_rows_match_individual_runs(world, robot, rng):
    trial = TrialConfig(steps=60)
    starts = sample_start_poses(world, robot, 2, rng)
    genomes = rng.uniform(-1, 1, size=(7, 218))
    batch = evaluate_population(genomes, world, robot, CAMERA, NETWORK, trial, starts)
    for genome, value in zip(genomes, batch):
        assert value == evaluate_individual(genome, world, robot, CAMERA, NETWORK, trial, starts)


def test_trajectory_mean_is_the_fitness(world, robot, rng):
    start = sample_start_poses(world, robot, 1, rng)[0]
    genome = rng.uniform(-1, 1, size=218)
    records = simulate_trajectory(genome, world, robot, CAMERA, NETWORK, 80, 0.1, start)
    fitness = evaluate_individual(genome, world, robot, CAMERA, NETWORK, TrialConfig(steps=80, starts_per_trial=1), [start])
    assert len(records) == 80
    assert abs(sum(float(r.phi) for r in records) / 80 - fitness) <= 1e-12


def test_colliding_start_is_refused(world, robot):
    with pytest.raises(HarnessError):
        evaluate_individual(np.zeros(218), world, robot, CAMERA, NETWORK, TrialConfig(starts_per_trial=1), [Pose(0.01, 0.5, 0.0)])


def test_start_count_must_match_trial(world, robot):
    with pytest.raises(HarnessError):
        evaluate_individual(np.zeros(218), world, robot, CAMERA, NETWORK, TrialConfig(starts_per_trial=2), [Pose(0.5, 0.5, 0.0)])


def test_scores_outside_unit_interval_rejected():
    with pytest.raises(HarnessError):
        Individual(genome=np.zeros(3)).score(1.5)


# ============================================
# GENETIC OPERATORS
# ============================================
def test_init_population_shape():
    population = init_population(EvolutionConfig(), NETWORK, RandomStreams(1).child(0, Role.INIT))
    assert len(population) == 60
    assert all(individual.genome.shape == (218,) for individual in population)
    assert all(np.all(np.abs(individual.genome) <= 1.0) for individual in population)


def test_zero_init_range_gives_zero_genes():
    population = init_population(EvolutionConfig(init_range=0.0), NETWORK, RandomStreams(1))
    assert all(not individual.genome.any() for individual in population)


def test_init_range_stays_within_the_weight_limit():
    population = init_population(EvolutionConfig(init_range=4.0), NETWORK, RandomStreams(1))
    assert all(np.all(np.abs(individual.genome) <= 4.0) for individual in population)
    with pytest.raises(ValidationError):
        EvolutionConfig(init_range=4.5)


def test_init_population_is_reproducible():
    first = init_population(EvolutionConfig(), NETWORK, RandomStreams(9).child(0, Role.INIT))
    second = init_population(EvolutionConfig(), NETWORK, RandomStreams(9).child(0, Role.INIT))
    assert all(np.array_equal(a.genome, b.genome) for a, b in zip(first, second))


def test_rank_breaks_ties_by_index():
    population = evaluated(np.zeros((4, 3)), [0.5, 0.7, 0.7, 0.1])
    assert rank(population) == [1, 2, 0, 3]


def test_unevaluated_population_rejected():
    population = [Individual(genome=np.zeros(3)), Individual(genome=np.ones(3))]
    population[0].score(0.4)
    with pytest.raises(HarnessError):
        next_generation(population, EvolutionConfig(population_size=2, parent_count=2), RandomStreams(0))


def test_disabled_operators_clone_top_parents(rng):
    config = EvolutionConfig(crossover_prob=0.0, mutation_prob=0.0)
    population = evaluated(rng.uniform(-1, 1, size=(60, 218)), rng.uniform(0, 1, size=60))
    top = [population[i].genome for i in rank(population)[:15]]
    offspring = next_generation(population, config, RandomStreams(4))
    assert len(offspring) == 60
    for child in offspring:
        assert any(np.array_equal(child, parent) for parent in top)


def test_elite_survives_unchanged(rng):
    population = evaluated(rng.uniform(-1, 1, size=(60, 218)), rng.uniform(0, 1, size=60))
    best = population[rank(population)[0]].genome
    offspring = next_generation(population, EvolutionConfig(), RandomStreams(4))
    assert np.array_equal(offspring[0], best)


def test_crossover_splices_two_parents(rng):
    config = EvolutionConfig(population_size=20, parent_count=10, crossover_prob=1.0, mutation_prob=0.0)
    values = np.linspace(-3.0, 3.0, 20)
    population = evaluated(np.repeat(values[:, None], 30, axis=1), np.linspace(1.0, 0.05, 20))
    for child in next_generation(population, config, RandomStreams(2))[1:]:
        switches = np.flatnonzero(np.diff(child))
        assert len(switches) == 1
        assert child[0] in values[:10] and child[-1] in values[:10]


def test_mutation_step_size(rng):
    config = EvolutionConfig(population_size=50, parent_count=15, crossover_prob=0.0, mutation_prob=1.0, mutation_std=0.3)
    genome = rng.uniform(-1, 1, size=218)
    population = evaluated(np.tile(genome, (50, 1)), rng.uniform(0, 1, size=50))
    offspring = np.array(next_generation(population, config, RandomStreams(6))[1:])
    change = np.abs(offspring - genome).mean()
    assert change == pytest.approx(0.3 * math.sqrt(2 / math.pi), rel=0.05)


def test_mutation_clamps_genes():
    config = EvolutionConfig(mutation_prob=1.0, mutation_std=10.0)
    child = mutate(np.full(500, 3.9), config, np.random.default_rng(0))
    assert np.all(np.abs(child) <= 4.0)
    assert np.any(child == 4.0)


def test_next_generation_is_reproducible(rng):
    population = evaluated(rng.uniform(-1, 1, size=(60, 218)), rng.uniform(0, 1, size=60))
    first = next_generation(population, EvolutionConfig(), RandomStreams(8).child(3, Role.BREED))
    second = next_generation(population, EvolutionConfig(), RandomStreams(8).child(3, Role.BREED))
    assert all(np.array_equal(a, b) for a, b in zip(first, second))


def test_selection_raises_the_mean_gene():
    config = EvolutionConfig()
    streams = RandomStreams(21)
    population = init_population(config, NETWORK, streams.child(0, Role.INIT))
    means = []
    for generation in range(10):
        for individual in population:
            individual.score((individual.genome.mean() + 4.0) / 8.0)
        means.append(float(np.mean([individual.genome.mean() for individual in population])))
        genomes = next_generation(population, config, streams.child(generation, Role.BREED))
        population = [Individual(genome=genome) for genome in genomes]
    assert all(b > a for a, b in zip(means, means[1:]))


def test_generation_stats_orders_best_and_mean(rng):
    population = evaluated(rng.uniform(-1, 1, size=(10, 5)), rng.uniform(0, 1, size=10))
    stats = generation_stats(4, population)
    assert stats.generation == 4
    assert stats.mean_fitness <= stats.best_fitness
    assert np.array_equal(stats.best_genome, population[rank(population)[0]].genome)


# ============================================
# RUNS
# ============================================
def test_single_generation_run(small_config):
    config = small_config.model_copy(update={'evolution': small_config.evolution.model_copy(update={'generations': 1})})
    history = run_evolution(45.0, config, 11)
    assert len(history.stats) == 1
    assert history.stats[0].best_fitness >= history.stats[0].mean_fitness


def test_runs_are_reproducible(small_config):
    first = run_evolution(30.0, small_config, 5)
    second = run_evolution(30.0, small_config, 5)
    assert np.array_equal(first.best_series(), second.best_series())
    assert np.array_equal(first.mean_series(), second.mean_series())
    assert all(np.array_equal(a.best_genome, b.best_genome) for a, b in zip(first.stats, second.stats))
    assert [s.generation for s in first.stats] == [0, 1, 2]


def test_elitism_is_monotone_with_fixed_starts(world):
    config = AppConfig.model_validate({
        'trial': {'steps': 40},
        'evolution': {'population_size': 10, 'parent_count': 4, 'generations': 30},
    })
    starts = sample_start_poses(world, config.robot, 2, np.random.default_rng(3))
    best = run_evolution(45.0, config, 17, fixed_start_poses=starts).best_series()
    assert len(best) == 30
    assert all(b >= a for a, b in zip(best, best[1:]))


def test_generation_starts_are_shared_and_redrawn(small_config):
    run = EvolutionRun(small_config, 45.0, 2)
    assert run.start_poses(0) == run.start_poses(0)
    assert run.start_poses(0) != run.start_poses(1)


def test_fov_outside_range_rejected(small_config):
    with pytest.raises(ConfigError):
        run_evolution(190.0, small_config, 0)


def test_run_uses_its_own_field_of_view(small_config):
    run = EvolutionRun(small_config, 120.0, 0)
    assert run.camera.fov_deg == 120.0
    assert run.camera.pixel_count == small_config.camera.pixel_count
    assert build_world(small_config.arena).segments.tolist() == run.world.segments.tolist()


def test_robot_spec_axle_limit():
    with pytest.raises(ValueError):
        RobotSpec(body_radius=0.02, axle_track=0.05)
