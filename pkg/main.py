import argparse
import json
import logging
import math
import os
import sys
from typing import Any, Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from arena.utils import Pose, build_world, inside_arena, sample_start_poses
from config import (
    APP_NAME,
    BEST_GENOME_FILE,
    DEFAULT_OUT_DIR,
    DEFAULT_SEED,
    EXIT_IO,
    EXIT_OK,
    HISTORY_COLUMNS,
    HISTORY_FILE,
    LOG_FORMAT,
    PRESETS,
    SEED_ENV_VAR,
    TRAJECTORY_COLUMNS,
    TRAJECTORY_FILE,
)
from evolution.evolution import run_evolution
from evolution.utils import simulate_trajectory
from exceptions import ConfigError, EvoNavError, ReportFormatError
from experiments.sweep import run_sweep
from experiments.utils import SweepResult, aggregate_replicates, best_fov, evaluation_count, good_fov_band
from models import AppConfig
from report.report import ReportWriter
from report.utils import (
    analysis_files,
    genome_document,
    history_rows,
    load_genome_file,
    load_history_csv,
    parse_history,
    render_csv,
)
from streams import RandomStreams, Role, derive_seed

load_dotenv(find_dotenv())

logger = logging.getLogger(__name__)


# ============================================
# CONFIG LOADING
# ============================================
def validate_config(data: dict[str, Any]) -> AppConfig:
    """Defaults applied, every invariant checked; errors name the offending field."""
    try:
        return AppConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = '.'.join(str(part) for part in first['loc']) or 'config'
        if first['type'] == 'extra_forbidden':
            raise ConfigError(f'{field}: unknown key') from exc
        raise ConfigError(f'{field}: {first["msg"]}') from exc


def parse_config(text: str) -> AppConfig:
    return validate_config(load_config_data(text))


def load_config_data(text: str) -> dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f'config syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}') from exc
    if not isinstance(data, dict):
        raise ConfigError('config: top level must be a JSON object')
    return data


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def parse_fov_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise ConfigError(f'--fovs: expected comma-separated degrees, got {text!r}') from exc


def fov_range(fov_min: float, fov_max: float, fov_step: float) -> list[float]:
    if fov_step <= 0 or fov_max < fov_min:
        raise ConfigError('--fov-min/--fov-max/--fov-step: need step > 0 and max >= min')
    count = math.floor((fov_max - fov_min) / fov_step + 1e-9) + 1
    return [round(fov_min + k * fov_step, 9) for k in range(count)]


def env_seed() -> int:
    value = os.getenv(SEED_ENV_VAR)
    if value is None or value == '':
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f'{SEED_ENV_VAR} must be an integer, got {value!r}') from exc


def flag_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}

    def put(section: str, key: str, value: Any):
        if value is not None:
            overrides.setdefault(section, {})[key] = value

    put('evolution', 'generations', getattr(args, 'generations', None))
    put('evolution', 'population_size', getattr(args, 'population', None))
    put('camera', 'fov_deg', getattr(args, 'fov', None))
    put('trial', 'steps', getattr(args, 'steps', None))
    put('sweep', 'replicates', getattr(args, 'replicates', None))
    put('sweep', 'base_seed', getattr(args, 'seed', None))

    if getattr(args, 'fovs', None):
        put('sweep', 'fov_values', parse_fov_list(args.fovs))
    elif getattr(args, 'fov_min', None) is not None or getattr(args, 'fov_max', None) is not None:
        low = args.fov_min if args.fov_min is not None else 0.0
        high = args.fov_max if args.fov_max is not None else 180.0
        put('sweep', 'fov_values', fov_range(low, high, args.fov_step))
    return overrides


def resolve_config(args: argparse.Namespace, extra: Optional[dict[str, Any]] = None) -> AppConfig:
    """defaults < EVONAV_SEED < config file < extra (e.g. genome file) < preset < flags."""
    data: dict[str, Any] = {'sweep': {'base_seed': env_seed()}}
    if args.config:
        try:
            with open(args.config, encoding='utf-8') as handle:
                text = handle.read()
        except UnicodeDecodeError as exc:
            raise ConfigError(f'{args.config}: not UTF-8 ({exc.reason} at byte {exc.start})') from exc
        file_data = load_config_data(text)
        validate_config(file_data)
        data = deep_merge(data, file_data)
    if extra:
        data = deep_merge(data, extra)
    preset = getattr(args, 'preset', None)
    if preset:
        data = deep_merge(data, PRESETS[preset])
    return validate_config(deep_merge(data, flag_overrides(args)))


# ============================================
# COMMANDS
# ============================================
def cmd_evolve(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    fov = config.camera.fov_deg
    seed = config.sweep.base_seed
    run_seed = derive_seed(seed, 0, 0)
    logger.info(f'Evolving at fov={fov:g} for {config.evolution.generations} generations (seed {seed})')

    history = run_evolution(fov, config, run_seed)
    result = SweepResult.from_histories((fov,), 1, {(0, 0): history})
    final = history.stats[-1]
    genome = genome_document(final.best_genome, config.network, final.best_fitness, fov)

    files = {
        HISTORY_FILE: render_csv(HISTORY_COLUMNS, history_rows(result)),
        BEST_GENOME_FILE: genome.model_dump_json(indent=2) + '\n',
    }
    details = {
        'fov_deg': fov,
        'run_seed': run_seed,
        'evaluations': config.evolution.generations * config.evolution.population_size,
        'final_best_fitness': final.best_fitness,
        'final_mean_fitness': final.mean_fitness,
    }
    ReportWriter(args.out).write_with_manifest(files, 'evolve', config, seed, details)
    logger.info(f'Final generation: best={final.best_fitness:.4f} mean={final.mean_fitness:.4f}')
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    seed = config.sweep.base_seed
    count = evaluation_count(config)
    writer = ReportWriter(args.out)

    if args.dry_run:
        print(f'evaluations: {count}')
        logger.info(f'Dry run: {count} evaluations planned, nothing simulated')
        writer.write_with_manifest({}, 'sweep', config, seed, {'dry_run': True, 'evaluations': count})
        return EXIT_OK

    result = run_sweep(config, jobs=args.jobs)
    history_text = render_csv(HISTORY_COLUMNS, history_rows(result))
    # the analysis reads the history exactly as written so `report` can reproduce it
    serialized = parse_history(history_text)
    files = {HISTORY_FILE: history_text, **analysis_files(serialized)}

    aggregate = aggregate_replicates(serialized)
    logger.info(
        f'Best fov (best individual): {best_fov(aggregate, "best"):g}, '
        f'(average individual): {best_fov(aggregate, "average"):g}, '
        f'good band (average): {good_fov_band(aggregate, "average")}'
    )
    writer.write_with_manifest(files, 'sweep', config, seed, {'evaluations': count})
    return EXIT_OK


def parse_start(text: str) -> Pose:
    try:
        x, y, heading = (float(part) for part in text.split(','))
    except ValueError as exc:
        raise ConfigError(f'--start: expected X,Y,HEADING, got {text!r}') from exc
    return Pose(x, y, heading)


def cmd_replay(args: argparse.Namespace) -> int:
    document, error = load_genome_file(args.genome_file)
    if error:
        raise ReportFormatError(error)

    extra: dict[str, Any] = {
        'camera': {'pixel_count': document.spec.n_inputs},
        'network': document.spec.model_dump(),
    }
    if document.fov_deg is not None:
        extra['camera']['fov_deg'] = document.fov_deg
    config = resolve_config(args, extra)
    seed = config.sweep.base_seed
    world = build_world(config.arena)

    if args.start:
        start = parse_start(args.start)
        if not inside_arena(world, start.x, start.y):
            raise ConfigError(f'--start: ({start.x}, {start.y}) is not inside the arena')
    else:
        rng = RandomStreams(seed).generator(Role.REPLAY)
        start = sample_start_poses(world, config.robot, 1, rng)[0]

    steps = config.trial.steps
    records = simulate_trajectory(
        document.weights, world, config.robot, config.camera, config.network, steps, config.trial.dt, start
    )
    fitness = sum(float(record.phi) for record in records) / steps
    rows = [
        (r.step, float(r.x), float(r.y), float(r.heading), float(r.v_left), float(r.v_right), float(r.phi), bool(r.collision))
        for r in records
    ]

    details = {'start': list(start), 'steps': steps, 'fitness': fitness, 'collided': bool(records[-1].collision)}
    ReportWriter(args.out).write_with_manifest(
        {TRAJECTORY_FILE: render_csv(TRAJECTORY_COLUMNS, rows)}, 'replay', config, seed, details
    )
    print(f'fitness: {fitness!r}')
    logger.info(f'Replay fitness {fitness:.6f} over {steps} steps from {tuple(start)}')
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    result, error = load_history_csv(args.history)
    if error:
        raise ReportFormatError(error)

    files = analysis_files(result)
    details = {'history': os.path.abspath(args.history), 'fov_values': list(result.fov_values)}
    ReportWriter(args.out).write_with_manifest(files, 'report', config, config.sweep.base_seed, details)
    return EXIT_OK


COMMANDS = {
    'evolve': cmd_evolve,
    'sweep': cmd_sweep,
    'replay': cmd_replay,
    'report': cmd_report,
}


# ============================================
# ARGUMENT PARSING
# ============================================
def non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f'expected a non-negative integer, got {text}')
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f'expected a positive integer, got {text}')
    return value


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--config', help='JSON config file')
    shared.add_argument('--seed', type=non_negative_int, help=f'base seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})')
    shared.add_argument('--out', default=DEFAULT_OUT_DIR, help='output directory')
    shared.add_argument('--jobs', type=positive_int, default=1, help='worker processes for sweep cells')
    shared.add_argument('--generations', type=positive_int)
    shared.add_argument('--population', type=positive_int)
    shared.add_argument('--verbose', action='store_true', help='log every generation')
    shared.add_argument('--log-file', help='also append log lines to this file')

    parser = argparse.ArgumentParser(prog=APP_NAME, description='Evolve vision-guided robot controllers across fields of view.')
    commands = parser.add_subparsers(dest='command', required=True)

    evolve = commands.add_parser('evolve', parents=[shared], help='one evolution run at one fov')
    evolve.add_argument('--fov', type=float, help='field of view in degrees')

    sweep = commands.add_parser('sweep', parents=[shared], help='evolution runs across a fov grid')
    grid = sweep.add_mutually_exclusive_group()
    grid.add_argument('--fovs', help='comma-separated fov values')
    grid.add_argument('--fov-min', type=float)
    sweep.add_argument('--fov-max', type=float)
    sweep.add_argument('--fov-step', type=float, default=1.0)
    sweep.add_argument('--replicates', type=positive_int)
    sweep.add_argument('--preset', choices=sorted(PRESETS))
    sweep.add_argument('--dry-run', action='store_true', help='count evaluations without simulating')

    replay = commands.add_parser('replay', parents=[shared], help='trajectory of a saved genome')
    replay.add_argument('genome_file')
    replay.add_argument('--fov', type=float)
    replay.add_argument('--steps', type=positive_int)
    replay.add_argument('--start', help='X,Y,HEADING (default: drawn from the replay stream of --seed)')

    report = commands.add_parser('report', parents=[shared], help='recompute analyses from a history.csv')
    report.add_argument('history')
    return parser


def setup_logging(verbose: bool = False, log_file: Optional[str] = None):
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True
    )


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.log_file)
    try:
        return COMMANDS[args.command](args)
    except EvoNavError as exc:
        logger.error(str(exc))
        return exc.exit_code
    except OSError as exc:
        logger.error(f'I/O error: {exc}')
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
