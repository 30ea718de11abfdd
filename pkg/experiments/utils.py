from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from config import GOOD_FITNESS, STABILIZATION_TOL, STABILIZED_BY_GENERATION
from evolution.utils import RunHistory
from models import AppConfig

SeriesChoice = Literal['best', 'average']


@dataclass(eq=False)
class SweepResult:
    """fitness[f, r, g] = (best_fitness, mean_fitness) for fov f, replicate r, generation g."""
    fov_values: tuple[float, ...]
    fitness: np.ndarray
    histories: dict[tuple[int, int], RunHistory] = field(default_factory=dict)

    @property
    def replicates(self) -> int:
        return self.fitness.shape[1]

    @property
    def generations(self) -> int:
        return self.fitness.shape[2]

    @classmethod
    def from_histories(cls, fov_values, replicates: int, histories: dict[tuple[int, int], RunHistory]):
        generations = len(next(iter(histories.values())).stats)
        fitness = np.empty((len(fov_values), replicates, generations, 2))
        for (f, r), history in histories.items():
            fitness[f, r, :, 0] = history.best_series()
            fitness[f, r, :, 1] = history.mean_series()
        return cls(fov_values=tuple(fov_values), fitness=fitness, histories=dict(histories))


@dataclass(frozen=True, eq=False)
class AggregateSeries:
    fov_values: tuple[float, ...]
    best: np.ndarray      # (F, G) replicate-mean of best_fitness
    average: np.ndarray   # (F, G) replicate-mean of mean_fitness

    def series(self, choice: SeriesChoice) -> np.ndarray:
        if choice == 'best':
            return self.best
        if choice == 'average':
            return self.average
        raise ValueError(f"series choice must be 'best' or 'average', got {choice!r}")


def aggregate_replicates(result: SweepResult) -> AggregateSeries:
    """Arithmetic mean over the replicate axis, kept inside the replicate range."""
    values = result.fitness
    mean = np.clip(values.mean(axis=1), values.min(axis=1), values.max(axis=1))
    return AggregateSeries(fov_values=result.fov_values, best=mean[..., 0], average=mean[..., 1])


def stabilization_generation(series, tol: float = STABILIZATION_TOL) -> int:
    """First generation after which every value stays within tol (relative) of the final value."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError('series must not be empty')
    last = series[-1]
    outside = np.flatnonzero(np.abs(series - last) > tol * max(last, 1e-9))
    return int(outside[-1] + 1) if outside.size else 0


def generations_to_threshold(series, threshold: float = GOOD_FITNESS) -> Optional[int]:
    reached = np.flatnonzero(np.asarray(series, dtype=float) >= threshold)
    return int(reached[0]) if reached.size else None


def best_fov(aggregate: AggregateSeries, series_choice: SeriesChoice = 'best') -> float:
    final = aggregate.series(series_choice)[:, -1]
    return aggregate.fov_values[int(np.argmax(final))]


def heatmap_matrix(aggregate: AggregateSeries, series_choice: SeriesChoice = 'best') -> np.ndarray:
    """Rows are fovs ascending, columns generations ascending."""
    return np.ascontiguousarray(aggregate.series(series_choice))


def good_fov_band(
    aggregate: AggregateSeries,
    series_choice: SeriesChoice = 'average',
    threshold: float = GOOD_FITNESS,
) -> Optional[tuple[float, float]]:
    final = aggregate.series(series_choice)[:, -1]
    good = [fov for fov, value in zip(aggregate.fov_values, final) if value >= threshold]
    return (good[0], good[-1]) if good else None


def stabilized_fraction(
    result: SweepResult,
    by_generation: int = STABILIZED_BY_GENERATION,
    tol: float = STABILIZATION_TOL,
) -> float:
    """Share of (fov, replicate) best-fitness series that settle by `by_generation`."""
    best = result.fitness[..., 0].reshape(-1, result.generations)
    settled = [stabilization_generation(series, tol) <= by_generation for series in best]
    return sum(settled) / len(settled)


def evaluation_count(config: AppConfig) -> int:
    return (
        len(config.sweep.fov_values)
        * config.sweep.replicates
        * config.evolution.generations
        * config.evolution.population_size
    )


def summary_table(aggregate: AggregateSeries, tol: float = STABILIZATION_TOL) -> list[tuple]:
    """(fov, final best, final avg, stabilization gen best, stabilization gen avg) per fov."""
    return [
        (
            fov,
            float(aggregate.best[f, -1]),
            float(aggregate.average[f, -1]),
            stabilization_generation(aggregate.best[f], tol),
            stabilization_generation(aggregate.average[f], tol),
        )
        for f, fov in enumerate(aggregate.fov_values)
    ]


def threshold_table(aggregate: AggregateSeries, threshold: float = GOOD_FITNESS) -> list[tuple]:
    return [
        (
            fov,
            threshold,
            generations_to_threshold(aggregate.best[f], threshold),
            generations_to_threshold(aggregate.average[f], threshold),
        )
        for f, fov in enumerate(aggregate.fov_values)
    ]


def analysis_summary(result: SweepResult, aggregate: AggregateSeries, threshold: float = GOOD_FITNESS) -> dict:
    return {
        'best_fov_best': best_fov(aggregate, 'best'),
        'best_fov_average': best_fov(aggregate, 'average'),
        'good_fov_band_best': good_fov_band(aggregate, 'best', threshold),
        'good_fov_band_average': good_fov_band(aggregate, 'average', threshold),
        'good_fitness_threshold': threshold,
        'stabilized_fraction': stabilized_fraction(result),
        'stabilized_by_generation': STABILIZED_BY_GENERATION,
    }
