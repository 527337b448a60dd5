"""Independent reference computations used to freeze expected values.

Nothing here imports the package's simulation or solver code.
"""

import itertools
from fractions import Fraction

import numpy as np


def count_round_trips(num_nodes, start, required, horizon):
    """Brute force over all node sequences of a complete graph with loops."""
    n = 0
    for middle in itertools.product(range(1, num_nodes + 1), repeat=horizon - 2):
        if set(required) <= set(middle):
            n += 1
    return n


def inclusion_exclusion_count(num_nodes, num_required, free_slots):
    """Sequences over ``num_nodes`` symbols hitting every required symbol."""
    total = 0
    for k in range(num_required + 1):
        total += (-1) ** k * _binom(num_required, k) * (num_nodes - k) ** free_slots
    return total


def _binom(n, k):
    out = 1
    for j in range(k):
        out = out * (n - j) // (j + 1)
    return out


def edge_cost(d, w, s):
    d, s = Fraction(d), Fraction(s)
    if s <= w:
        return d / (s + 1)
    return d * (1 - Fraction(w * w) / (s * (w + 1)))


def grid_bce(tables, prior, step=0.005):
    """Minimum expected social cost over symmetric policies on a grid.

    ``tables[x][a1][a2] = (c1, c2)`` with actions 0=C and 1=D. Per state the
    policy puts ``alpha`` on CC, ``beta`` on CD and DC each, the rest on DD.
    Obedience is checked row by row straight from the tables.
    """
    ticks = np.round(np.arange(0.0, 1.0 + step / 2, step), 10)
    a, b = np.meshgrid(ticks, ticks, indexing="ij")
    ok = a + 2 * b <= 1 + 1e-12
    a, b = a[ok], b[ok]
    dd = 1 - a - 2 * b

    def parts(x):
        t = tables[x]
        sigma = {(0, 0): a, (0, 1): b, (1, 0): b, (1, 1): dd}
        cost = sum(sigma[k] * (t[k[0]][k[1]][0] + t[k[0]][k[1]][1]) for k in sigma)
        # player 1 told C then D (player 2 symmetric by construction)
        told_c = sum(sigma[(0, o)] * (t[0][o][0] - t[1][o][0]) for o in (0, 1))
        told_d = sum(sigma[(1, o)] * (t[1][o][0] - t[0][o][0]) for o in (0, 1))
        return cost, told_c, told_d

    c0, c0_c, c0_d = parts(0)
    c1, c1_c, c1_d = parts(1)
    q0, q1 = float(prior[0]), float(prior[1])
    best = (np.inf, None, None)
    for lo in range(0, len(a), 512):
        sl = slice(lo, lo + 512)
        cost = q0 * c0[sl, None] + q1 * c1[None, :]
        ic_c = q0 * c0_c[sl, None] + q1 * c1_c[None, :] <= 1e-9
        ic_d = q0 * c0_d[sl, None] + q1 * c1_d[None, :] <= 1e-9
        cost = np.where(ic_c & ic_d, cost, np.inf)
        k = np.unravel_index(np.argmin(cost), cost.shape)
        if cost[k] < best[0]:
            best = (float(cost[k]), (a[lo + k[0]], b[lo + k[0]]), (a[k[1]], b[k[1]]))
    return best
