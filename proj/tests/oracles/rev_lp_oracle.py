"""Independent oracle for two-good optimal revenue on finite supports.

Solves the full pairwise-IC linear program with scipy's HiGHS backend (no row
generation) and prints golden values that are frozen into the C++ tests.

    python3 tests/oracles/rev_lp_oracle.py
"""
import itertools

import numpy as np
from scipy.optimize import linprog


def rev(points, probs, monotone=False, npt=False):
    n = len(points)
    # variables per point: q1, q2, b
    c = np.zeros(3 * n)
    for i, ((x1, x2), p) in enumerate(zip(points, probs)):
        c[3 * i] = -p * x1
        c[3 * i + 1] = -p * x2
        c[3 * i + 2] = p
    rows = []
    for i, j in itertools.permutations(range(n), 2):
        # b_i - b_j + q_i . (x_j - x_i) <= 0
        r = np.zeros(3 * n)
        r[3 * i + 2] += 1.0
        r[3 * j + 2] -= 1.0
        r[3 * i] += points[j][0] - points[i][0]
        r[3 * i + 1] += points[j][1] - points[i][1]
        rows.append(r)
    if monotone:
        for i, j in itertools.permutations(range(n), 2):
            xi, xj = points[i], points[j]
            if xi[0] <= xj[0] and xi[1] <= xj[1]:
                # s_i - s_j <= 0 with s = q.x - b
                r = np.zeros(3 * n)
                r[3 * i] += xi[0]
                r[3 * i + 1] += xi[1]
                r[3 * i + 2] -= 1.0
                r[3 * j] -= xj[0]
                r[3 * j + 1] -= xj[1]
                r[3 * j + 2] += 1.0
                rows.append(r)
    if npt:
        for i in range(n):
            r = np.zeros(3 * n)
            r[3 * i] -= points[i][0]
            r[3 * i + 1] -= points[i][1]
            r[3 * i + 2] += 1.0
            rows.append(r)
    A = np.array(rows) if rows else None
    b = np.zeros(len(rows)) if rows else None
    bounds = []
    for _ in range(n):
        bounds += [(0, 1), (0, 1), (0, None)]
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return -res.fun


def product(v1, p1, v2, p2):
    pts, prs = [], []
    for a, pa in zip(v1, p1):
        for b, pb in zip(v2, p2):
            pts.append((a, b))
            prs.append(pa * pb)
    return pts, prs


def main():
    pts, prs = product([1, 2], [0.5, 0.5], [1, 2], [0.5, 0.5])
    print("iid{1,2}^2 rev    = %.12f" % rev(pts, prs))
    print("iid{1,2}^2 monrev = %.12f" % rev(pts, prs, monotone=True))
    print("iid{1,2}^2 rev+npt= %.12f" % rev(pts, prs, npt=True))
    pts, prs = product([1, 2], [0.5, 0.5], [0], [1])
    print("x2=0, X1 u{1,2}   = %.12f" % rev(pts, prs))
    fixtures = {
        "C": ([1, 2, 4], [0.3, 0.4, 0.3], [1, 3], [0.5, 0.5]),
        "D": ([0.5, 1.5, 2.5, 3.5], [0.25] * 4, [0.5, 1.5, 2.5, 3.5], [0.25] * 4),
        "E": ([1, 3], [0.7, 0.3], [2, 5, 6], [0.2, 0.3, 0.5]),
    }
    for name, (v1, p1, v2, p2) in fixtures.items():
        pts, prs = product(v1, p1, v2, p2)
        print("fixture %s rev    = %.12f" % (name, rev(pts, prs)))
        print("fixture %s monrev = %.12f" % (name, rev(pts, prs, monotone=True)))
    # correlated two-point instance
    print("corr {(1,0),(0,1)} = %.12f" % rev([(1, 0), (0, 1)], [0.5, 0.5]))
    # uniform(0,1) discretized into g cells at the cell midpoints
    for g in (8, 12):
        v = [(k + 0.5) / g for k in range(g)]
        pts, prs = product(v, [1.0 / g] * g, v, [1.0 / g] * g)
        print("uniform grid %d rev = %.12f" % (g, rev(pts, prs)))
    # iid {1,2}^2 smoothed by eps * U[0,1]^2, U on a 4x4 midpoint sub-grid
    for eps in (0.2, 0.1, 0.05):
        pts, prs = [], []
        for (x1, x2), p in zip(*product([1, 2], [0.5, 0.5], [1, 2], [0.5, 0.5])):
            for a in range(4):
                for b in range(4):
                    pts.append((x1 + eps * (a + 0.5) / 4, x2 + eps * (b + 0.5) / 4))
                    prs.append(p / 16)
        print("smooth eps=%g rev = %.12f" % (eps, rev(pts, prs)))
    # small hand-picked correlated instances
    small = {
        "S1": ([(0.5, 2.0), (1.5, 0.2), (2.5, 2.5), (0.1, 0.1), (3.0, 1.0)], [0.1, 0.25, 0.2, 0.3, 0.15]),
        "S2": ([(1, 3), (3, 1), (2, 2), (4, 0), (0, 4), (1, 1)], [0.2, 0.2, 0.1, 0.15, 0.15, 0.2]),
    }
    for name, (pts, prs) in small.items():
        print("%s rev = %.12f monrev = %.12f" % (name, rev(pts, prs), rev(pts, prs, monotone=True)))


if __name__ == "__main__":
    main()
