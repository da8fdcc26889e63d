#!/usr/bin/env python3
"""
Report Formatter
Writes benchmark results as versioned CSV files and gnuplot-friendly plot data.
"""

import csv
import logging
import math
from collections import OrderedDict
from pathlib import Path
from typing import Dict, List, Tuple, Union

from src.models.errors import ReportFormatError
from src.models.experiment_models import (
    AGGREGATE_COLUMNS, RAW_COLUMNS, AggregateRow, BenchmarkRow, format_field
)
from src.models.factorization_models import SolveReport
from src.services.benchmark_runner import pivot

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ReportFormatter:
    """Formats benchmark rows and aggregates for files on disk."""

    CSV_VERSION_LINE = '# orthofact-csv v1'
    METRICS = {'rse': 'mean_rse', 'infeas': 'mean_infeas'}

    def write_raw_csv(self, rows: List[BenchmarkRow], path: PathLike) -> Path:
        """Write one line per solve under the versioned header."""
        return self._write_csv(path, RAW_COLUMNS, [row.to_csv_fields() for row in rows])

    def write_aggregate_csv(self, aggregates: List[AggregateRow], path: PathLike) -> Path:
        """Write the group means."""
        return self._write_csv(path, AGGREGATE_COLUMNS, [a.to_csv_fields() for a in aggregates])

    def write_pivot_csv(self, aggregates: List[AggregateRow], metric: str, path: PathLike) -> Path:
        """Write one metric in result-table layout (see benchmark_runner.pivot)."""
        header, rows = pivot(aggregates, metric)
        return self._write_csv(path, header, [[format_field(v) for v in row] for row in rows])

    def read_raw_csv(self, path: PathLike) -> List[BenchmarkRow]:
        """
        Parse a raw benchmark CSV.

        Raises:
            ReportFormatError: on a missing version line, missing columns or bad values
        """
        path = Path(path)
        try:
            with open(path, 'r', encoding='utf-8', newline='') as f:
                first = f.readline().strip()
                if first != self.CSV_VERSION_LINE:
                    raise ReportFormatError(
                        f"{path}: expected '{self.CSV_VERSION_LINE}' on the first line, got '{first}'"
                    )
                reader = csv.DictReader(f)
                missing = [c for c in RAW_COLUMNS if c not in (reader.fieldnames or [])]
                if missing:
                    raise ReportFormatError(f"{path}: missing column(s) {', '.join(missing)}")
                rows = []
                for record in reader:
                    try:
                        rows.append(BenchmarkRow.from_dict(record))
                    except (TypeError, ValueError) as e:
                        # header and version lines precede the first record
                        raise ReportFormatError(f"{path}, line {reader.line_num + 1}: {e}") from e
        except OSError as e:
            raise ReportFormatError(f"Could not read {path}: {e}") from e
        return rows

    def plot_series(self, aggregates: List[AggregateRow], metric: str) -> Dict[Tuple, List[List[object]]]:
        """
        Build plot tables per (kind, n, algorithm).

        Each table has the p percentage in the first column and one column per
        beta; Mirzal and PG tables also carry the Ding series as a reference.

        Returns:
            Mapping of (kind, n, alg) to [header, *rows]
        """
        attribute = self.METRICS.get(metric)
        if attribute is None:
            raise ValueError(f"Unknown metric '{metric}', expected one of {sorted(self.METRICS)}")

        series: "OrderedDict[Tuple, Dict[float, Dict[int, float]]]" = OrderedDict()
        for a in aggregates:
            key = (a.kind, a.n, a.alg)
            series.setdefault(key, {}).setdefault(a.beta, {})[a.p_percent] = getattr(a, attribute)

        tables = OrderedDict()
        for (kind, n, alg), by_beta in series.items():
            betas = sorted(by_beta)
            ding = series.get((kind, n, 'ding'), {}).get(0.0, {}) if alg != 'ding' else {}
            percents = sorted({p for values in by_beta.values() for p in values})

            if alg == 'ding':
                header = ['p_percent', 'ding']
            else:
                header = ['p_percent'] + [f"beta={beta:g}" for beta in betas]
                if ding:
                    header.append('ding')
            rows = []
            for percent in percents:
                row = [percent] + [by_beta[beta].get(percent, math.nan) for beta in betas]
                if alg != 'ding' and ding:
                    row.append(ding.get(percent, math.nan))
                rows.append(row)
            tables[(kind, n, alg)] = [header] + rows
        return tables

    def write_plot_data(self, aggregates: List[AggregateRow], out_dir: PathLike) -> List[Path]:
        """
        Write RSE and infeasibility plot data for every (kind, n, algorithm).

        Files are whitespace-delimited with '#' comment headers, named
        plot_<kind>_n=<n>_<alg>_<metric>.dat.
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for metric in self.METRICS:
            for (kind, n, alg), table in self.plot_series(aggregates, metric).items():
                path = out_dir / f"plot_{kind}_n={n}_{alg}_{metric}.dat"
                header, rows = table[0], table[1:]
                lines = [
                    f"# kind={kind} n={n} alg={alg} metric={metric}",
                    '# ' + ' '.join(header),
                ]
                lines.extend(' '.join(format_field(v) for v in row) for row in rows)
                path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
                written.append(path)
        logger.info("Wrote %d plot-data files to %s", len(written), out_dir)
        return written

    def write_trace_csv(self, report: SolveReport, path: PathLike) -> Path:
        """Write the per-iteration RSE, infeasibility and objective of one solve."""
        rows = [
            [str(i), format_field(r), format_field(v), format_field(f)]
            for i, (r, v, f) in enumerate(zip(report.rse_trace, report.infeas_trace, report.objective_trace))
        ]
        return self._write_csv(path, ['iteration', 'rse', 'infeas', 'objective'], rows)

    def format_summary(self, aggregates: List[AggregateRow], metric: str = 'rse') -> str:
        """Plain-text result table for terminal output."""
        header, rows = pivot(aggregates, metric)
        cells = [header] + [
            [str(v) if not isinstance(v, float) else ('nan' if math.isnan(v) else f"{v:.4f}") for v in row]
            for row in rows
        ]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        return '\n'.join('  '.join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)

    def _write_csv(self, path: PathLike, header: List[str], rows: List[List[str]]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(self.CSV_VERSION_LINE + '\n')
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        return path
