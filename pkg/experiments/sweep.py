import logging

from experiments.utils import SweepResult
from models import AppConfig
from scheduler import SweepCell, run_cells
from streams import derive_seed

logger = logging.getLogger(__name__)


def sweep_cells(config: AppConfig) -> list[SweepCell]:
    """Every (fov, replicate) cell with seed = derive_seed(base_seed, fov_index, replicate)."""
    sweep = config.sweep
    return [
        SweepCell(
            fov_index=f,
            replicate=r,
            fov_deg=fov,
            seed=derive_seed(sweep.base_seed, f, r),
        )
        for f, fov in enumerate(sweep.fov_values)
        for r in range(sweep.replicates)
    ]


def run_sweep(config: AppConfig, jobs: int = 1) -> SweepResult:
    cells = sweep_cells(config)
    logger.info(
        f'Sweep: {len(config.sweep.fov_values)} fov value(s) x {config.sweep.replicates} replicate(s), '
        f'{config.evolution.generations} generations of {config.evolution.population_size}'
    )
    histories = run_cells(cells, config, jobs)
    by_cell = {(cell.fov_index, cell.replicate): history for cell, history in zip(cells, histories)}
    return SweepResult.from_histories(config.sweep.fov_values, config.sweep.replicates, by_cell)
