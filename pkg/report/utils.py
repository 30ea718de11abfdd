import csv
import io
import json
import logging
import math
from typing import Any, Iterable, Optional

import numpy as np
from pydantic import ValidationError

from config import (
    ANALYSIS_FILE,
    HEATMAP_AVG_FILE,
    HEATMAP_BEST_FILE,
    HISTORY_COLUMNS,
    SIGNIFICANT_DIGITS,
    SUMMARY_COLUMNS,
    SUMMARY_FILE,
    THRESHOLD_COLUMNS,
    THRESHOLDS_FILE,
)
from exceptions import ReportFormatError
from experiments.utils import (
    SweepResult,
    aggregate_replicates,
    analysis_summary,
    heatmap_matrix,
    summary_table,
    threshold_table,
)
from models import GenomeFile, NetworkSpec

logger = logging.getLogger(__name__)


# ============================================
# FORMATTING
# ============================================
def format_value(value: Any) -> str:
    """Floats with 9 significant digits, ints as-is, None as an empty cell."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f'{float(value):.{SIGNIFICANT_DIGITS}g}'


def render_csv(header: list[str], rows: Iterable[Iterable[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def history_rows(result: SweepResult) -> list[tuple]:
    rows = []
    for f, fov in enumerate(result.fov_values):
        for r in range(result.replicates):
            for g in range(result.generations):
                best, mean = result.fitness[f, r, g]
                rows.append((fov, r, g, best, mean))
    return rows


def heatmap_csv(matrix: np.ndarray, fov_values: tuple[float, ...]) -> str:
    header = ['fov_deg'] + [str(g) for g in range(matrix.shape[1])]
    return render_csv(header, ([fov, *row] for fov, row in zip(fov_values, matrix)))


def analysis_files(result: SweepResult) -> dict[str, str]:
    """Everything derived from a history: summary, thresholds, both heatmaps, analysis.json."""
    aggregate = aggregate_replicates(result)
    return {
        SUMMARY_FILE: render_csv(SUMMARY_COLUMNS, summary_table(aggregate)),
        THRESHOLDS_FILE: render_csv(THRESHOLD_COLUMNS, threshold_table(aggregate)),
        HEATMAP_BEST_FILE: heatmap_csv(heatmap_matrix(aggregate, 'best'), aggregate.fov_values),
        HEATMAP_AVG_FILE: heatmap_csv(heatmap_matrix(aggregate, 'average'), aggregate.fov_values),
        ANALYSIS_FILE: render_json(analysis_summary(result, aggregate)),
    }


# ============================================
# HISTORY PARSING
# ============================================
def _parse_number(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ReportFormatError(f'row {line}: {column} is not a number ({text!r})')
    if not math.isfinite(value):
        raise ReportFormatError(f'row {line}: {column} is not finite ({text!r})')
    return value


def parse_history(text: str) -> SweepResult:
    """Rebuild a complete SweepResult from history.csv text; every cell must appear once."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != HISTORY_COLUMNS:
        raise ReportFormatError(f'row 1: header must be {",".join(HISTORY_COLUMNS)}, got {header}')

    cells: dict[tuple[float, int, int], tuple[float, float]] = {}
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(HISTORY_COLUMNS):
            raise ReportFormatError(f'row {line}: expected {len(HISTORY_COLUMNS)} fields, got {len(row)}')
        fov = _parse_number(row[0], line, 'fov_deg')
        replicate = _parse_number(row[1], line, 'replicate')
        generation = _parse_number(row[2], line, 'generation')
        best = _parse_number(row[3], line, 'best_fitness')
        mean = _parse_number(row[4], line, 'mean_fitness')
        if replicate != int(replicate) or generation != int(generation) or replicate < 0 or generation < 0:
            raise ReportFormatError(f'row {line}: replicate and generation must be non-negative integers')
        if not (0.0 <= mean <= best <= 1.0):
            raise ReportFormatError(f'row {line}: need 0 <= mean_fitness <= best_fitness <= 1')
        key = (fov, int(replicate), int(generation))
        if key in cells:
            raise ReportFormatError(f'row {line}: duplicate cell fov={fov:g} replicate={key[1]} generation={key[2]}')
        cells[key] = (best, mean)

    if not cells:
        raise ReportFormatError('row 2: history has no data rows')

    fov_values = tuple(sorted({key[0] for key in cells}))
    replicates = max(key[1] for key in cells) + 1
    generations = max(key[2] for key in cells) + 1
    fitness = np.empty((len(fov_values), replicates, generations, 2))
    for f, fov in enumerate(fov_values):
        for r in range(replicates):
            for g in range(generations):
                if (fov, r, g) not in cells:
                    raise ReportFormatError(f'history is missing cell fov={fov:g} replicate={r} generation={g}')
                fitness[f, r, g] = cells[(fov, r, g)]
    return SweepResult(fov_values=fov_values, fitness=fitness)


def load_history_csv(path: str) -> tuple[Optional[SweepResult], Optional[str]]:
    """Returns (result, error). I/O failures are raised, format problems are returned."""
    try:
        with open(path, encoding='utf-8') as handle:
            return parse_history(handle.read()), None
    except (ReportFormatError, csv.Error, UnicodeDecodeError) as exc:
        logger.error(f'Malformed history {path}: {exc}')
        return None, str(exc)


# ============================================
# GENOME FILES
# ============================================
def genome_document(
    genome: np.ndarray,
    spec: NetworkSpec,
    fitness: Optional[float] = None,
    fov_deg: Optional[float] = None,
) -> GenomeFile:
    return GenomeFile(spec=spec, weights=np.asarray(genome, dtype=float).tolist(), fitness=fitness, fov_deg=fov_deg)


def load_genome_file(path: str) -> tuple[Optional[GenomeFile], Optional[str]]:
    """Returns (genome file, error). I/O failures are raised, format problems are returned."""
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except UnicodeDecodeError as exc:
        error = f'invalid genome file {path}: not UTF-8 ({exc.reason} at byte {exc.start})'
        logger.error(error)
        return None, error
    try:
        return GenomeFile.model_validate_json(text), None
    except ValidationError as exc:
        first = exc.errors()[0]
        where = '.'.join(str(part) for part in first['loc']) or 'document'
        error = f'invalid genome file {path}: {where}: {first["msg"]}'
        logger.error(error)
        return None, error
