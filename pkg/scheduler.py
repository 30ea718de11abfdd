import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

from evolution.evolution import run_evolution
from evolution.utils import RunHistory
from models import AppConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepCell:
    """One independent evolution job: a (fov, replicate) cell of the sweep grid."""
    fov_index: int
    replicate: int
    fov_deg: float
    seed: int


def run_cell(cell: SweepCell, config: AppConfig) -> RunHistory:
    history = run_evolution(cell.fov_deg, config, cell.seed)
    logger.info(
        f'  ✓ Cell fov={cell.fov_deg:g} replicate={cell.replicate}: '
        f'final best={history.stats[-1].best_fitness:.4f} mean={history.stats[-1].mean_fitness:.4f}'
    )
    return history


def run_cells(cells: list[SweepCell], config: AppConfig, jobs: int = 1) -> list[RunHistory]:
    """Run every cell; results come back in the order of `cells` whatever the schedule."""
    logger.info(f'Scheduling {len(cells)} cells on {max(jobs, 1)} worker(s)')
    if jobs <= 1 or len(cells) <= 1:
        return [run_cell(cell, config) for cell in cells]

    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(partial(run_cell, config=config), cells))
