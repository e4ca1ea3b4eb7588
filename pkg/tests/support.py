"""Shared fixtures-in-spirit: random generators and independent oracles.

Everything here is deliberately written from first principles (loops and
textbook formulas) so the test suite checks the package against code that
does not share its implementation.
"""

from itertools import combinations, permutations

import numpy as np

import walraskit as wk


def random_economy(rng, goods, n_consumers, positive_endowments=True):
    consumers = []
    for _ in range(n_consumers):
        alpha = rng.dirichlet(np.full(goods, 5.0))
        low = 0.25 if positive_endowments else 0.0
        omega = rng.uniform(low, 2.0, size=goods)
        if not positive_endowments:
            omega[rng.integers(goods)] = 0.0
            if not np.any(omega > 0):
                omega[0] = 1.0
        consumers.append(wk.Consumer(alpha, omega))
    return wk.Economy(tuple(consumers))


def random_interior_prices(rng, n, goods, concentration=1.0):
    return rng.dirichlet(np.full(goods, concentration), size=n)


def edgeworth_symmetric():
    return wk.Economy(
        (wk.Consumer([0.5, 0.5], [1.0, 0.0]), wk.Consumer([0.5, 0.5], [0.0, 1.0]))
    )


def edgeworth_asymmetric():
    return wk.Economy(
        (wk.Consumer([0.25, 0.75], [1.0, 0.0]), wk.Consumer([0.5, 0.5], [0.0, 1.0]))
    )


def cubic_field():
    """Chart map -(c - 0.3)(c - 0.5)(c - 0.7): zeros 0.3, 0.5, 0.7 with
    slopes -0.08, +0.04, -0.08."""
    return wk.chart_field(lambda C: -(C - 0.3) * (C - 0.5) * (C - 0.7), goods=2)


# --- independent oracles ------------------------------------------------------


def oracle_basis_vectors(alpha, levels, p):
    """Canonical excess demands straight from the closed formula, by loops."""
    goods = len(alpha)
    Z = np.zeros((goods, goods))
    for i in range(goods):
        for j in range(goods):
            if j == i:
                Z[j, i] = -(1.0 - alpha[i]) * levels[i]
            else:
                Z[j, i] = alpha[j] * (p[i] / p[j]) * levels[i]
    return Z


def oracle_positive_kernel(alpha, levels, p):
    """Closed-form positive dependency, derived from sum_i k_i z_i = 0:
    writing s_i = k_i p_i w_i, coordinate j of the sum is
    alpha_j/p_j * sum(s) - s_j/p_j, so s is proportional to alpha."""
    kappa = np.asarray(alpha) / (np.asarray(p) * np.asarray(levels))
    return kappa / kappa.min()


def scan_zeros_1d(field, n_points=100_001, margin=1e-4, refine=True):
    """Sign-change scan of a two-good field's chart map, bisection-refined."""
    xs = np.linspace(margin, 1.0 - margin, n_points)
    g = field.chart_values(xs[:, None])[:, 0]
    zeros = list(xs[g == 0.0])
    idx = np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)
    lo, hi = xs[idx].copy(), xs[idx + 1].copy()
    glo = g[idx].copy()
    if refine and idx.size:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            gm = field.chart_values(mid[:, None])[:, 0]
            left = np.sign(gm) == np.sign(glo)
            lo = np.where(left, mid, lo)
            glo = np.where(left, gm, glo)
            hi = np.where(left, hi, mid)
        zeros.extend(0.5 * (lo + hi))
    elif idx.size:
        zeros.extend(0.5 * (lo + hi))
    return np.sort(np.asarray(zeros))


def brute_force_sarp(prices, bundles, tie_tol=1e-10, distinct_tol=1e-10):
    """Exhaustive cycle enumeration over distinct-bundle groups (n <= 8)."""
    P = np.asarray(prices, dtype=float)
    X = np.asarray(bundles, dtype=float)
    T = P.shape[0]
    group_of = [-1] * T
    reps = []
    for i in range(T):
        for g, r in enumerate(reps):
            if np.max(np.abs(X[i] - X[r])) <= distinct_tol:
                group_of[i] = g
                break
        else:
            group_of[i] = len(reps)
            reps.append(i)
    n = len(reps)
    edge = np.zeros((n, n), dtype=bool)
    for i in range(T):
        for j in range(T):
            if group_of[i] != group_of[j] and P[i] @ X[j] <= P[i] @ X[i] + tie_tol:
                edge[group_of[i], group_of[j]] = True
    for size in range(2, n + 1):
        for subset in combinations(range(n), size):
            first, rest = subset[0], subset[1:]
            for perm in permutations(rest):
                cyc = (first,) + perm
                if all(edge[cyc[k], cyc[(k + 1) % size]] for k in range(size)):
                    return False
    return True


def walras_residuals(economy, P):
    """|p . z(p)| per price row, computed against the package's field values."""
    from walraskit.consumers import aed_rows

    Z = aed_rows(economy, P)
    return np.abs(np.einsum("ij,ij->i", P, Z))
