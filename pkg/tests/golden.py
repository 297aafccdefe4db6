"""Frozen reference values shared by the unit and acceptance tests."""

from fractions import Fraction as F

PHI = {
    1: [F(0), F(-3, 2), F(11, 12), F(-283, 432), F(5759, 11520), F(-57137, 144000), F(2353751, 7257600)],
    2: [F(1, 2), F(-7, 4), F(23, 18), F(-19951, 17280), F(64903, 57600), F(-13803863, 12096000)],
    3: [F(1, 12), F(-575, 432), F(15101, 11520), F(-8827, 5400), F(2229089, 1036800),
        F(-361022171, 127008000)],
}
PSI = {
    1: [F(0), F(11, 4), F(-49, 36), F(2473, 4320), F(1307, 14400), F(-12743687, 18144000),
        F(194960323, 152409600)],
    2: [F(7, 12), F(239, 36), F(-6283, 2880), F(-4529, 3600), F(9283591, 1814400),
        F(-137478949, 14112000)],
}

C1_MAGNITUDE = 1.8925417883446868
C2 = 0.59789875
S0_HALF = 0.726107

# S_r(a) + sign * S_r(1 - a) = e * poly(a), poly coefficients ascending
REFLECTION = {
    1: (-1, [-1, 2]),
    2: (1, [2, -4, 4]),
    3: (-1, [-5, 14, -12, 8]),
    4: (1, [15, -48, 64, -32, 16]),
}

# small-m coefficient rows: (coefficients, valid_from for the generic form, Iverson corrections)
D_ROWS = {
    0: ({"H_m": F(1)}, 0, {}),
    1: ({"H_m": F(1), "1": F(1, 2), "m": F(-3, 2)}, 1, {0: F(-1, 2)}),
    2: ({"H_m": F(2, 3), "1": F(1, 12), "m": F(-7, 4), "m^2": F(11, 12)}, 2,
        {0: F(-1, 12), 1: F(1, 12)}),
    3: ({"H_m": F(1, 2), "1": F(7, 24), "m": F(-575, 432), "m^2": F(23, 18), "m^3": F(-283, 432)}, 2, None),
    4: ({"H_m": F(5, 18), "1": F(-59, 720), "m": F(-3439, 3456), "m^2": F(15101, 11520),
         "m^3": F(-19951, 17280), "m^4": F(5759, 11520)}, 4, None),
}
D_TILDE_ROWS = {
    1: ({"H_m": F(-2), "H2_m": F(2)}, 0, {}),
    2: ({"H_m": F(-11, 2), "H2_m": F(7, 3), "1": F(7, 12), "m": F(11, 4)}, 2, None),
    3: ({"H_m": F(-73, 9), "H2_m": F(7, 3), "1": F(1, 6), "m": F(239, 36), "m^2": F(-49, 36)}, 2, None),
    4: ({"H_m": F(-1349, 144), "H2_m": F(2), "1": F(197, 144), "m": F(14135, 1728),
         "m^2": F(-6283, 2880), "m^3": F(2473, 4320)}, 4, None),
}
