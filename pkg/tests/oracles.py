"""Reference values computed with mpmath at 50 significant digits, then frozen.

Pearson statistic for [[47, 39], [30, 48]]: exact expected counts
e_ij = row_i * col_j / N and the sum of (o - e)^2 / e. Upper tails of the
one-degree chi-squared distribution: regularized upper incomplete gamma
Q(1/2, x/2), cross-checked against erfc(sqrt(x/2)).
"""

TABLE_1 = [[47, 39], [30, 48]]
TABLE_1_STATISTIC = 4.3042795216010933733
TABLE_1_P = 0.038016595128416699135
# with Yates' continuity correction, for contrast
TABLE_1_YATES_P = 0.055108

CHI2_SF = {
    0.0: 1.0,
    1.0: 0.31731050786291410283,
    3.84: 0.050043521248705098948,
    4.30: 0.038112373045213653773,
    6.63: 0.010027526446317953693,
    10.0: 0.0015654022580025496775,
}
