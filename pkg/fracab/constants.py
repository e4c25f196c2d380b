import math

GAMMA_OVERFLOW_THRESHOLD = 171.6

MITTAG_LEFFLER_TERM_CAP = 10_000
MITTAG_LEFFLER_SERIES_RADIUS = 1.0
MITTAG_LEFFLER_ASYMPTOTIC_THRESHOLD = -50.0

QUADRATURE_NODE_BUDGET = 10**6
QUADRATURE_GAUSS_ORDER = 16
QUADRATURE_INITIAL_PANELS = 8
QUADRATURE_GRADING_EXPONENT = 6.0
DERIVATIVE_TOLERANCE = 1e-10

FIXED_POINT_DAMPING = 0.5
FIXED_POINT_MAX_ITERATIONS = 200

FACTORIAL_GUARD = 20

# largest max error a reproduced table cell may show and still count as accurate
TABLE_ACCURACY_THRESHOLD = 1e-4
FISHER_DEFAULT_N = 8

BLOW_UP_THRESHOLD = 1e8

FIVE_PI = 5.0 * math.pi

# (dt, dx) -> (caputo, caputo-fabrizio, atangana-baleanu)
TABLE1_LADDER = (
    (0.25, 0.5, (6.6656e-06, 4.6187e-06, 1.4782e-06)),
    (0.0625, 0.25, (1.0653e-06, 7.1804e-07, 2.2827e-07)),
    (0.015625, 0.125, (3.3161e-07, 2.1293e-07, 6.6861e-08)),
    (0.00390625, 0.0625, (1.3995e-07, 8.3324e-08, 2.5625e-08)),
)
TABLE1_SETTINGS = {"delta": 10.0, "tau": 1.0, "alpha": 0.35, "T": 0.5, "L": 1.0}

# alpha -> ((caputo, cpu), (caputo-fabrizio, cpu), (atangana-baleanu, cpu))
TABLE2_ROWS = (
    (0.21, ((6.7827e-06, 0.18), (4.3656e-07, 0.17), (9.8489e-08, 0.18))),
    (0.43, ((1.0663e-05, 0.18), (1.0118e-06, 0.18), (2.2731e-07, 0.18))),
    (0.65, ((7.8794e-06, 0.18), (1.0197e-06, 0.18), (2.2784e-07, 0.18))),
    (0.89, ((2.9779e-06, 0.18), (4.1988e-07, 0.17), (8.9765e-08, 0.17))),
)
TABLE2_SETTINGS = {"delta": 1.0, "tau": 1.0, "dt": 0.05, "dx": 0.25, "T": 1.0, "L": 1.0}

FIGURE_SETTINGS = {"delta": 0.1, "alpha": 0.35, "tau": 1.0, "T": 2.0}
FIGURE2_ALPHAS = (0.1, 0.2, 0.3, 0.4)
FIGURE3_TIMES = (0.5, 1.0, 1.5, 2.0)
FIGURE3_LENGTHS = (1.0, 2.0, 3.0, 4.0)

ENV_PREFIX = "FRACAB_"
