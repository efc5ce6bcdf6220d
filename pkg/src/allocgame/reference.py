"""Published reference values that the ``reproduce`` targets compare against.

Rows and columns follow the strategy order given alongside each table.
Values are as printed (rounded), not recomputed.
"""

from __future__ import annotations

TABLE1_P = 0.4
TABLE1_STRATEGIES = [(0, 5), (1, 4), (2, 3), (3, 2), (4, 1), (5, 0)]
TABLE1 = [
    [0.00, -0.84, -0.53, -0.16, 0.19, 0.47],
    [0.84, 0.00, -0.33, 0.09, 0.42, 0.65],
    [0.53, 0.33, 0.00, 0.37, 0.64, 0.81],
    [0.16, -0.09, -0.37, 0.00, 0.83, 0.92],
    [-0.19, -0.42, -0.64, -0.83, 0.00, 0.98],
    [-0.47, -0.65, -0.81, -0.92, -0.98, 0.00],
]
TABLE1_SADDLE = (2, 3)

THREE_COUNTER_STRATEGIES = [(3, 0, 0), (2, 1, 0), (1, 1, 1)]
# probabilities stated with the three-counter numeric tables
TABLE3_STATED_PROBS = (0.6, 0.3, 0.1)
# upper-triangle entries (300 v 210, 300 v 111, 210 v 111), 3dp
TABLE3_COMMON = (-0.059, 0.595, 0.483)
TABLE3_SEPARATE = (0.200, 0.707, 0.519)

TABLE4_PROBS = (0.7, 0.2, 0.1)
TABLE4 = {
    (10, 0, 0): 4.2840,
    (9, 1, 0): 3.3731,
    (8, 2, 0): 3.9637,
    (8, 1, 1): 5.4261,
    (7, 3, 0): 6.3922,
    (7, 2, 1): 6.0878,
    (6, 4, 0): 10.4550,
    (6, 3, 1): 8.6927,
    (6, 2, 2): 12.2692,
    (5, 5, 0): 15.0561,
    (5, 4, 1): 12.2627,
    (5, 3, 2): 13.7832,
    (4, 4, 2): 16.6344,
    (4, 3, 3): 21.8522,
}

MIXED7_PROBS = (0.75, 0.125, 0.125)
MIXED7 = {(7, 0, 0): 0.156, (6, 1, 0): 0.189, (5, 1, 1): 0.655}

ZIPF_K = 4
ZIPF_N = 7
ZIPF_EXPECTATION_BEST = (5, 1, 1, 0)
ZIPF_SEPARATE_SADDLE = (4, 2, 1, 0)
# printed as 0.26 and 0.73; normalised so the pair sums to one
ZIPF_COMMON_PRINTED = {(4, 1, 1, 1): 0.26, (3, 2, 1, 1): 0.73}
ZIPF_COMMON = {(4, 1, 1, 1): 0.26, (3, 2, 1, 1): 0.74}

DICE_N = 11
DICE_STRATEGY_COUNT = 56
DICE_BEST = (0, 0, 1, 1, 2, 3, 2, 1, 1, 0, 0)

CRITICAL_P5 = {(4, 2): 0.686, (5, 1): 0.871}
