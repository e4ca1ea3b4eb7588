"""Positive-cone decomposition of tangent fields over canonical consumers.

A canonical family consists of ``l`` Cobb-Douglas consumers sharing one
preference vector ``alpha``, where consumer ``i`` holds only good ``i``.
Its individual excess demands at any interior price ``p`` are

    z_i(p)_j = alpha_j * (p_i / p_j) * level_i     for j != i,
    z_i(p)_i = -(1 - alpha_i) * level_i,

so each ``z_i`` has a strictly negative i-th coordinate and strictly
positive others.  The ``l`` vectors positively span the ``(l-1)``-dimensional
tangent space at ``p``: they admit a strictly positive linear dependency
(the "positive kernel"), and consequently every tangent vector is a strictly
positive combination of them.  Decomposing a whole tangent field pointwise
and interpolating the coefficients realises the field as the aggregate
excess demand of an ``l``-consumer economy.

The positive kernel has the closed form ``kappa_i ~ alpha_i / (p_i level_i)``;
the implementation nevertheless computes it from a singular value
decomposition and verifies dimension and sign, treating any failure of the
positive-spanning property as an internal error (it would disprove the
construction, so it is never silently ignored).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .consumers import Consumer, Economy
from .fields import TangentField, as_field
from .geometry import PricePoint, TangentVector, simplex_to_sphere
from .scales import KernelSampledScale

KERNEL_NULLSPACE_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
TANGENT_REJECT_TOL = 1e-8


class PositiveSpanningError(RuntimeError):
    """The canonical excess demands failed to positively span the tangent space.

    This contradicts the construction and indicates a numerical breakdown;
    it is reported rather than worked around.
    """


@dataclass(frozen=True)
class CanonicalFamily:
    """``l`` single-good Cobb-Douglas consumers with a shared share vector.

    Parameters
    ----------
    alpha : array_like
        Shared preference shares (positive, summing to one).
    endowment_levels : array_like, optional
        ``level_i`` is consumer i's holding of good i; defaults to all ones.
    """

    alpha: np.ndarray
    endowment_levels: np.ndarray | None = None

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        if alpha.ndim != 1 or alpha.size < 2:
            raise ValueError("alpha must be a vector of length >= 2")
        if np.any(alpha <= 0.0) or abs(alpha.sum() - 1.0) > 1e-12:
            raise ValueError("alpha must be strictly positive and sum to 1")
        levels = self.endowment_levels
        levels = np.ones_like(alpha) if levels is None else np.array(levels, dtype=float)
        if levels.shape != alpha.shape or np.any(levels <= 0.0):
            raise ValueError("endowment levels must be strictly positive, one per good")
        alpha.setflags(write=False)
        levels.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "endowment_levels", levels)

    @property
    def goods(self) -> int:
        return self.alpha.size

    @classmethod
    def symmetric(cls, goods: int, level: float = 1.0) -> "CanonicalFamily":
        return cls(np.full(goods, 1.0 / goods), np.full(goods, level))

    def consumers(self, scales=None) -> tuple[Consumer, ...]:
        """The family as plain consumers, optionally with per-consumer scales."""
        out = []
        for i in range(self.goods):
            omega = np.zeros(self.goods)
            omega[i] = self.endowment_levels[i]
            if scales is None:
                out.append(Consumer(self.alpha, omega))
            else:
                out.append(Consumer(self.alpha, omega, scale=scales[i]))
        return tuple(out)


@dataclass(frozen=True)
class DecompositionWitness:
    """Strictly positive coefficients reconstructing a target tangent vector."""

    price: PricePoint
    mu: np.ndarray
    residual: float

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if np.any(mu <= 0.0):
            raise ValueError("decomposition coefficients must be strictly positive")
        if self.residual > RECONSTRUCTION_TOL:
            raise ValueError(
                f"reconstruction residual {self.residual:.3e} exceeds "
                f"{RECONSTRUCTION_TOL:.0e}"
            )
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)


def basis_matrix(f: CanonicalFamily, P: np.ndarray) -> np.ndarray:
    """Stacked basis vectors over price rows.

    Returns ``Z`` of shape ``(n, l, l)`` with ``Z[k, :, i]`` the excess
    demand of canonical consumer ``i`` at price row ``k``.  Writing
    ``omega = levels``, the matrix at one price is
    ``outer(alpha / p, p * omega) - diag(omega)``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    A = f.alpha / P                          # (n, l) rows alpha_j / p_j
    B = P * f.endowment_levels               # (n, l) cols p_i * omega_i
    Z = A[:, :, None] * B[:, None, :]
    idx = np.arange(f.goods)
    Z[:, idx, idx] -= f.endowment_levels
    return Z


def basis_excess_demands(f: CanonicalFamily, p: PricePoint) -> list[TangentVector]:
    """The ``l`` canonical excess demands at ``p``, as tangent vectors."""
    Z = basis_matrix(f, p.coords[None, :])[0]
    base = simplex_to_sphere(p) if p.frame != "sphere" else p
    return [TangentVector(base, Z[:, i]) for i in range(f.goods)]


def kernel_weights(f: CanonicalFamily, P: np.ndarray) -> np.ndarray:
    """Closed-form positive kernel ``alpha_i / (p_i * level_i)`` per price row."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    return f.alpha / (P * f.endowment_levels)


def positive_kernel(f: CanonicalFamily, p: PricePoint) -> np.ndarray:
    """Strictly positive dependency of the canonical excess demands at ``p``.

    Computed from the SVD of the basis matrix and normalised so the smallest
    entry is one.  Raises :class:`PositiveSpanningError` if the nullspace is
    not one-dimensional or carries mixed signs.
    """
    Z = basis_matrix(f, p.coords[None, :])[0]
    _, s, vt = np.linalg.svd(Z)
    # Tangency of every column makes Z rank-deficient by exactly one when the
    # columns positively span the tangent space.
    if s[-1] > KERNEL_NULLSPACE_TOL * s[0]:
        raise PositiveSpanningError("basis matrix has trivial nullspace")
    if Z.shape[0] > 2 and s[-2] <= KERNEL_NULLSPACE_TOL * s[0]:
        raise PositiveSpanningError("basis nullspace is not one-dimensional")
    kappa = vt[-1]
    if np.all(kappa < 0.0):
        kappa = -kappa
    if np.any(kappa <= 0.0):
        raise PositiveSpanningError("basis nullspace vector has mixed signs")
    return kappa / kappa.min()


def decompose_at(
    f: CanonicalFamily,
    target: TangentVector,
    floor: float = 1.0,
) -> DecompositionWitness:
    """Strictly positive coefficients with ``sum_i mu_i z_i(p) = target``.

    Targets violating tangency by more than ``1e-8`` (relative to their
    magnitude) are rejected; the positive-spanning property is re-validated
    numerically at ``p`` on every call.

    The basis matrix is ``outer(alpha/p, p*omega) - diag(omega)``, so for a
    tangent target the solution set is the explicit line

        mu_j(S) = (S * alpha_j / p_j - v_j) / omega_j,

    directed by the positive kernel.  The witness returned is the unique
    point on that line whose smallest entry equals ``floor`` -- the same
    point the minimum-norm solution reaches after shifting along the kernel,
    but computed without a least-squares solve, which keeps the residual at
    rounding level even for targets of norm 1e6.
    """
    p = target.base
    v64 = target.components
    if abs(float(p.coords @ v64)) > TANGENT_REJECT_TOL * max(
        1.0, float(np.linalg.norm(v64))
    ):
        raise ValueError("target vector is not tangent at its base price")
    positive_kernel(f, p)  # numerical spanning assertion (raises on failure)

    # The construction runs in extended precision: re-orthogonalise the
    # target against the base, pick S, and form mu.  The returned mu is cast
    # back to double; its residual (measured in extended precision against
    # the caller's vector) is then dominated by that final rounding, about
    # eps * |v| * |alpha/p|.
    pc = p.coords.astype(np.longdouble)
    v = v64.astype(np.longdouble)
    vt = v - (pc @ v) * pc / (pc @ pc)
    a = f.alpha.astype(np.longdouble) / pc
    omega = f.endowment_levels.astype(np.longdouble)
    s_star = np.max((floor * omega + vt) / a)
    s_star += 1e-15 * (1.0 + abs(s_star))  # keep min(mu) >= floor despite rounding
    mu = np.asarray((a * s_star - vt) / omega, dtype=float)

    Z = basis_matrix(f, p.coords[None, :])[0].astype(np.longdouble)
    residual = float(np.linalg.norm(Z @ mu.astype(np.longdouble) - v))
    if residual > RECONSTRUCTION_TOL * max(1.0, float(np.linalg.norm(v64))):
        raise PositiveSpanningError(
            f"decomposition residual {residual:.3e} is too large"
        )
    return DecompositionWitness(price=p, mu=mu, residual=residual)


class GridTooCoarseError(ValueError):
    """Interpolated coefficients dipped non-positive between grid points."""


def realize_economy(
    f: CanonicalFamily,
    target_field,
    grid: list[PricePoint],
    floor: float = 1.0,
) -> Economy:
    """An ``l``-consumer economy whose aggregate excess demand matches a field
    on a price grid.

    Each grid point's target value is decomposed over the canonical basis;
    consumer ``i`` receives a scale interpolating its coefficients between
    grid points.  What is sampled is the ratio of the coefficient to the
    closed-form kernel weight: wherever the target is identically zero the
    sampled ratios coincide across consumers and the reconstructed aggregate
    vanishes exactly between grid points as well, not only at them.

    Raises :class:`GridTooCoarseError` if an interpolated coefficient fails
    to stay strictly positive between grid points.
    """
    field = target_field if isinstance(target_field, TangentField) else as_field(target_field)
    if not grid:
        raise ValueError("realisation needs a non-empty price grid")
    goods = f.goods
    chart_rows = np.empty((len(grid), goods - 1))
    ratios = np.empty((len(grid), goods))
    for k, p in enumerate(grid):
        simplex = p.simplex_coords()
        chart_rows[k] = simplex[:-1]
        witness = decompose_at(f, field.value(p), floor=floor)
        ratios[k] = witness.mu / kernel_weights(f, simplex[None, :])[0]

    scales = [
        KernelSampledScale(
            grid=chart_rows,
            values=ratios[:, i],
            good=i,
            share=float(f.alpha[i]),
            level=float(f.endowment_levels[i]),
        )
        for i in range(goods)
    ]
    _check_positive_between_nodes(scales, chart_rows)
    return Economy(f.consumers(scales=scales))


def _check_positive_between_nodes(scales, chart_rows: np.ndarray) -> None:
    # Shape-preserving (1-d) and piecewise-linear (n-d) interpolants cannot
    # leave the range of their node values, so with positive nodes this never
    # fires; it is kept as a cheap guard on the realisation contract.
    if chart_rows.shape[1] == 1:
        xs = np.sort(chart_rows[:, 0])
        dense = np.linspace(xs[0], xs[-1], 8 * xs.size + 1)
        probe = np.column_stack([dense, 1.0 - dense])
    else:
        probe_rows = 0.5 * (chart_rows[:-1] + chart_rows[1:])
        probe = np.hstack(
            [probe_rows, 1.0 - probe_rows.sum(axis=1, keepdims=True)]
        )
    for scale in scales:
        if np.any(scale(probe) <= 0.0):
            raise GridTooCoarseError(
                "interpolated coefficient is not strictly positive between "
                "grid points; refine the grid"
            )
