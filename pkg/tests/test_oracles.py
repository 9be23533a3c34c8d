"""Recompute the frozen oracle values at high precision, when mpmath is around."""

import pytest

from oracles import CHI2_SF, TABLE_1, TABLE_1_P, TABLE_1_STATISTIC, TABLE_1_YATES_P

mp = pytest.importorskip("mpmath")
mp.mp.dps = 50


def _statistic(table, yates=False):
    (a, b), (c, d) = [[mp.mpf(v) for v in row] for row in table]
    n = a + b + c + d
    diff = abs(a * d - b * c)
    if yates:
        diff = max(diff - n / 2, 0)
    return n * diff**2 / ((a + b) * (c + d) * (a + c) * (b + d))


def close(exact, frozen):
    # the frozen constants are doubles
    return abs(exact - frozen) <= 4e-16 * max(abs(frozen), 1e-300)


def _sf(x):
    return mp.erfc(mp.sqrt(mp.mpf(x) / 2))


@pytest.mark.parametrize("x, p", sorted(CHI2_SF.items()))
def test_tail_constants(x, p):
    assert close(_sf(x), p)


def test_table_constants():
    assert close(_statistic(TABLE_1), TABLE_1_STATISTIC)
    assert close(_sf(_statistic(TABLE_1)), TABLE_1_P)
    assert abs(_sf(_statistic(TABLE_1, yates=True)) - TABLE_1_YATES_P) < 5e-7
