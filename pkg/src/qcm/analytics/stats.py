"""Pearson chi-squared test for 2x2 tables and small order statistics."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    p_value: float
    degrees_of_freedom: int = 1
    expected: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.0), (0.0, 0.0))


def chi2_sf_1dof(statistic: float) -> float:
    """Upper tail of the chi-squared distribution with one degree of freedom.

    For one degree of freedom P(X > x) = erfc(sqrt(x / 2)); ``math.erfc`` is
    accurate to a few ulps across the whole range.
    """
    if statistic < 0 or math.isnan(statistic):
        raise ValueError(f"statistic must be non-negative, got {statistic}")
    if statistic == 0:
        return 1.0
    return math.erfc(math.sqrt(statistic / 2.0))


def chi_squared_2x2(table: Sequence[Sequence[int]]) -> ChiSquareResult:
    """Pearson test of independence without continuity correction."""
    if len(table) != 2 or any(len(row) != 2 for row in table):
        raise ValueError("table must be 2x2")
    cells = [[Fraction(v) for v in row] for row in table]
    if any(v < 0 for row in cells for v in row):
        raise ValueError("counts must be non-negative")
    rows = [cells[0][0] + cells[0][1], cells[1][0] + cells[1][1]]
    cols = [cells[0][0] + cells[1][0], cells[0][1] + cells[1][1]]
    if any(m == 0 for m in rows + cols):
        raise ValueError(f"zero marginal total (rows {rows}, columns {cols})")
    n = rows[0] + rows[1]
    stat = Fraction(0)
    expected = []
    for i in range(2):
        exp_row = []
        for j in range(2):
            e = rows[i] * cols[j] / n
            stat += (cells[i][j] - e) ** 2 / e
            exp_row.append(float(e))
        expected.append(tuple(exp_row))
    statistic = float(stat)
    return ChiSquareResult(statistic, chi2_sf_1dof(statistic), 1, tuple(expected))  # type: ignore[arg-type]


def table_from_tallies(tallies: Iterable[tuple[str, str, int]]) -> tuple[list[str], list[str], list[list[int]]]:
    """Sum (row_label, column_label, count) tallies into a 2x2 table.

    Labels are sorted; exactly two distinct labels are required on each axis.
    """
    sums: dict[tuple[str, str], int] = {}
    for r, c, n in tallies:
        if n < 0:
            raise ValueError(f"negative tally for ({r}, {c})")
        sums[(r, c)] = sums.get((r, c), 0) + n
    row_labels = sorted({r for r, _ in sums})
    col_labels = sorted({c for _, c in sums})
    if len(row_labels) != 2 or len(col_labels) != 2:
        raise ValueError(f"need exactly 2 row and 2 column labels, got {row_labels} x {col_labels}")
    table = [[sums.get((r, c), 0) for c in col_labels] for r in row_labels]
    return row_labels, col_labels, table


def median(values: Sequence[float]) -> float | None:
    """Middle order statistic; mean of the two middle values for even counts."""
    if not values:
        return None
    return float(statistics.median(values))
