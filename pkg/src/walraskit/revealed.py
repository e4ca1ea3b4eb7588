"""Finite-data revealed-preference checks.

Given observations ``(p^k, x^k)`` of prices and chosen bundles, bundle
``x^i`` is weakly revealed preferred to ``x^j`` when ``p^i . x^j <= p^i . x^i``
(``x^j`` was affordable when ``x^i`` was chosen).  The Strong Axiom of
Revealed Preference requires this relation to be acyclic over distinct
bundles; utility-maximising behaviour implies it, so a violating cycle is a
certificate that no single consumer generated the data.

Positive rescalings of an individual excess-demand field preserve the
properties a consumer's excess demand must have; ``scaled_field_audit``
verifies the checkable ones (Walras' law, the endowment lower bound, strict
positivity of the scaling) on price samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .consumers import Consumer, demand, excess_rows, scale_rows
from .geometry import PricePoint

TIE_TOL = 1e-10
DISTINCT_TOL = 1e-10


@dataclass(frozen=True)
class ObservationDataset:
    """Paired price and bundle observations, stored as ``(T, l)`` arrays."""

    prices: np.ndarray
    bundles: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.prices, dtype=float))
        X = np.atleast_2d(np.asarray(self.bundles, dtype=float))
        if P.shape != X.shape or P.shape[0] < 1:
            raise ValueError("prices and bundles must be equal-shape (T, l) arrays")
        if np.any(P <= 0.0):
            raise ValueError("observed prices must be strictly positive")
        if np.any(X < 0.0):
            raise ValueError("observed bundles must be non-negative")
        P = P.copy()
        X = X.copy()
        P.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "prices", P)
        object.__setattr__(self, "bundles", X)

    @property
    def size(self) -> int:
        return self.prices.shape[0]

    @property
    def goods(self) -> int:
        return self.prices.shape[1]


@dataclass(frozen=True)
class SarpResult:
    passed: bool
    cycle: tuple | None = None   # observation indices i1 -> i2 -> ... -> i1

    def __bool__(self) -> bool:
        return self.passed


def _distinct_groups(X: np.ndarray) -> np.ndarray:
    """Map each observation to the representative of its identical-bundle group."""
    T = X.shape[0]
    rep = np.arange(T)
    for i in range(T):
        if rep[i] != i:
            continue
        same = np.max(np.abs(X - X[i]), axis=1) <= DISTINCT_TOL
        rep[same & (rep == np.arange(T))] = i
    return rep


def preference_matrix(d: ObservationDataset):
    """Weak revealed preference between distinct-bundle groups.

    Returns ``(adj, reps)``: a boolean adjacency matrix over bundle groups
    (same-bundle pairs excluded) and the representative observation index of
    each group.
    """
    P, X = d.prices, d.bundles
    spend_own = np.einsum("ij,ij->i", P, X)
    spend_cross = P @ X.T                   # [i, j] = p^i . x^j
    weak = spend_cross <= spend_own[:, None] + TIE_TOL
    rep = _distinct_groups(X)
    reps, gidx = np.unique(rep, return_inverse=True)
    n = reps.size
    mask = weak & (gidx[:, None] != gidx[None, :])
    adj = np.zeros((n, n), dtype=bool)
    if mask.any():
        pair_ids = gidx[:, None] * n + gidx[None, :]
        adj.flat[np.unique(pair_ids[mask])] = True
    return adj, reps


def _find_cycle(adj: np.ndarray) -> list[int] | None:
    """A directed cycle in the adjacency matrix, or None.  Iterative DFS with
    three-colour marking; returns the node sequence without the closing node."""
    n = adj.shape[0]
    color = np.zeros(n, dtype=int)  # 0 white, 1 on stack, 2 done
    parent = np.full(n, -1)
    for root in range(n):
        if color[root] != 0:
            continue
        stack = [(root, iter(np.flatnonzero(adj[root])))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 0:
                    color[nxt] = 1
                    parent[nxt] = node
                    stack.append((nxt, iter(np.flatnonzero(adj[nxt]))))
                    advanced = True
                    break
                if color[nxt] == 1:
                    cycle = [node]
                    while cycle[-1] != nxt:
                        cycle.append(int(parent[cycle[-1]]))
                    cycle.reverse()
                    return cycle
            if not advanced:
                color[node] = 2
                stack.pop()
    return None


def sarp_check(d: ObservationDataset) -> SarpResult:
    """Check the Strong Axiom of Revealed Preference on a dataset.

    Passes when the weak revealed-preference digraph over distinct bundles is
    acyclic; otherwise returns one witnessing cycle of observation indices.
    Permuting the observations never changes the verdict.
    """
    if d.size == 1:
        return SarpResult(True)
    adj, reps = preference_matrix(d)
    cycle = _find_cycle(adj)
    if cycle is None:
        return SarpResult(True)
    return SarpResult(False, tuple(int(reps[k]) for k in cycle))


def sample_demand(c: Consumer, prices: list[PricePoint]) -> ObservationDataset:
    """Observe the consumer's demanded bundle at each price."""
    if not prices:
        raise ValueError("at least one price is required")
    P = np.vstack([p.coords for p in prices])
    X = np.vstack([demand(c, p) for p in prices])
    return ObservationDataset(P, X)


@dataclass(frozen=True)
class AuditReport:
    samples: int
    max_walras_violation: float
    lower_bound_violations: int
    nonpositive_scale_samples: tuple
    passed: bool


def scaled_field_audit(
    c: Consumer,
    prices: list[PricePoint],
    walras_tol: float = 1e-9,
) -> AuditReport:
    """Audit a positively scaled excess demand on price samples.

    Checks, at every sample: the scaling is strictly positive (samples where
    it is not are flagged and skipped), the scaled field satisfies Walras'
    law within ``walras_tol``, and each component respects the lower bound
    ``scale(p) * (-omega_i)`` that any excess demand of a consumer endowed
    with ``omega`` obeys.
    """
    if not prices:
        raise ValueError("at least one sample price is required")
    P = np.vstack([p.simplex_coords() for p in prices])
    S = P / P.sum(axis=1, keepdims=True)
    raw_scale = np.asarray(c.scale(S), dtype=float)
    flagged = tuple(int(i) for i in np.flatnonzero(~(raw_scale > 0.0)))
    good = np.asarray([i for i in range(len(prices)) if i not in flagged])

    max_walras = 0.0
    bound_violations = 0
    if good.size:
        Z = excess_rows(c, P[good])
        walras = np.abs(np.einsum("ij,ij->i", P[good], Z))
        max_walras = float(walras.max())
        lower = -scale_rows(c, P[good])[:, None] * c.endowment
        bound_violations = int(np.any(Z < lower - 1e-9, axis=1).sum())

    passed = not flagged and max_walras <= walras_tol and bound_violations == 0
    return AuditReport(
        samples=len(prices),
        max_walras_violation=max_walras,
        lower_bound_violations=bound_violations,
        nonpositive_scale_samples=flagged,
        passed=passed,
    )
