"""Perturbation experiments: do small perturbations make equilibria finite?

The experimental arena is a two-good economy whose excess demand vanishes on
a whole chart interval ``[a, b]`` (a continuum of equilibria), built by
realising the piecewise-cubic field

    g(c) = (a - c)^3   for c < a,
           0           on [a, b],
           (b - c)^3   for c > b,

over the canonical consumer family.  The field is C^2, positive left of the
interval and negative right of it, so it points inward and every small
perturbation keeps at least one zero.

Perturbations add ``epsilon * basis(c)`` to the chart map, with the basis
drawn from a closed family (linear tilt, seeded random polynomial, seeded
random Fourier sum) and scaled so that both its sampled sup-norm and the
sup-norm of its derivative over the chart are one.  "Small" therefore means
small together with the first derivative on the working region, where the
experiment actually probes the field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import CanonicalFamily, realize_economy
from .equilibrium import (
    ContinuumConfig,
    EquilibriumReport,
    SolverConfig,
    find_equilibria,
)
from .fields import TangentField, as_field, chart_field
from .geometry import simplex_point

BASIS_KINDS = ("linear_tilt", "polynomial", "random_fourier")


@dataclass(frozen=True)
class PerturbationSpec:
    """A seeded perturbation: ``epsilon * basis`` added to the chart map.

    ``epsilon = 0`` is allowed and produces the identical field.
    """

    epsilon: float
    basis: str = "random_fourier"
    degree: int = 3
    terms: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be non-negative")
        if self.basis not in BASIS_KINDS:
            raise ValueError(f"basis must be one of {BASIS_KINDS}")
        if self.degree < 1 or self.terms < 1:
            raise ValueError("degree and terms must be at least 1")

    def with_seed(self, seed: int) -> "PerturbationSpec":
        return PerturbationSpec(self.epsilon, self.basis, self.degree, self.terms, seed)


def _basis_functions(spec: PerturbationSpec, dim: int):
    """Componentwise basis value and derivative functions, before scaling."""
    if spec.basis == "linear_tilt":
        return (lambda C: 0.5 - C), (lambda C: -np.ones_like(C))
    rng = np.random.default_rng(spec.seed)
    if spec.basis == "polynomial":
        coeffs = rng.standard_normal((dim, spec.degree + 1))

        def value(C):
            out = np.zeros_like(C)
            for j in range(dim):
                out[:, j] = np.polynomial.polynomial.polyval(C[:, j], coeffs[j])
            return out

        def deriv(C):
            out = np.zeros_like(C)
            for j in range(dim):
                dc = np.polynomial.polynomial.polyder(coeffs[j])
                out[:, j] = np.polynomial.polynomial.polyval(C[:, j], dc)
            return out

        return value, deriv
    # random_fourier
    amp_sin = rng.standard_normal((dim, spec.terms))
    amp_cos = rng.standard_normal((dim, spec.terms))
    k = 2.0 * np.pi * np.arange(1, spec.terms + 1)

    def value(C):
        phases = C[:, :, None] * k  # (n, dim, terms)
        return (amp_sin * np.sin(phases) + amp_cos * np.cos(phases)).sum(axis=2)

    def deriv(C):
        phases = C[:, :, None] * k
        return (k * (amp_sin * np.cos(phases) - amp_cos * np.sin(phases))).sum(axis=2)

    return value, deriv


def _normalizer(value, deriv, dim: int) -> float:
    xs = np.linspace(0.0, 1.0, 1025)
    probe = np.column_stack([xs] * dim)
    sup = max(float(np.abs(value(probe)).max()), float(np.abs(deriv(probe)).max()))
    return sup if sup > 0.0 else 1.0


def perturb(field_or_economy, spec: PerturbationSpec) -> TangentField:
    """Add ``epsilon * basis`` (sup-normalised with its derivative) to the chart map."""
    base = as_field(field_or_economy)
    if spec.epsilon == 0.0:
        return base
    value, deriv = _basis_functions(spec, base.dim)
    norm = _normalizer(value, deriv, base.dim)
    eps = spec.epsilon / norm

    def fn(C):
        return base.chart_values(C) + eps * value(C)

    return TangentField(base.goods, fn)


def continuum_chart_map(a: float, b: float):
    """The piecewise-cubic chart map vanishing exactly on ``[a, b]``."""

    def g(C):
        c = C[:, 0]
        out = np.zeros_like(c)
        left = c < a
        right = c > b
        out[left] = (a - c[left]) ** 3
        out[right] = (b - c[right]) ** 3
        return out[:, None]

    return g


def build_continuum_economy(
    interval: tuple[float, float],
    grid: int = 201,
    family: CanonicalFamily | None = None,
    grid_margin: float = 0.01,
):
    """A two-good economy whose equilibrium set contains the chart interval.

    The piecewise-cubic field above is realised over the canonical family on
    a uniform chart grid; the economy reproduces the field at the grid points
    (and exactly, between grid points, on the interior of ``[a, b]``).
    """
    a, b = float(interval[0]), float(interval[1])
    if not (0.0 < a < b < 1.0):
        raise ValueError("interval must satisfy 0 < a < b < 1")
    fam = family or CanonicalFamily.symmetric(2)
    if fam.goods != 2:
        raise ValueError("the continuum construction is two-good")
    if isinstance(grid, int):
        if grid < 5:
            raise ValueError("grid needs at least 5 points")
        xs = np.linspace(grid_margin, 1.0 - grid_margin, grid)
    else:
        xs = np.asarray(grid, dtype=float)
    target = chart_field(continuum_chart_map(a, b), goods=2)
    points = [simplex_point([x, 1.0 - x]) for x in xs]
    return realize_economy(fam, target, points)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    epsilon: float
    n_equilibria: int
    all_regular: bool
    index_sum: int
    finite: bool
    error: str | None = None


@dataclass(frozen=True)
class GenericityResult:
    records: tuple

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def finite_count(self) -> int:
        return sum(1 for r in self.records if r.error is None and r.finite)

    @property
    def all_regular_count(self) -> int:
        return sum(
            1
            for r in self.records
            if r.error is None and r.finite and r.all_regular
        )

    @property
    def equilibrium_counts(self) -> list[int]:
        return [r.n_equilibria for r in self.records]


def genericity_experiment(
    base,
    spec: PerturbationSpec,
    trials: int,
    solver_config: SolverConfig | None = None,
    continuum_config: ContinuumConfig | None = None,
) -> GenericityResult:
    """Perturb ``base`` with ``trials`` fresh seeds and tally the outcomes.

    Trial ``t`` uses seed ``spec.seed + t``.  Each trial runs the equilibrium
    solver and the continuum detector on the perturbed field; solver failures
    are recorded per trial and do not abort the batch.  Results are
    deterministic in the seed.
    """
    if trials < 1:
        raise ValueError("at least one trial is required")
    base_field = as_field(base)
    records = []
    for t in range(trials):
        trial_spec = spec.with_seed(spec.seed + t)
        try:
            perturbed = perturb(base_field, trial_spec)
            report: EquilibriumReport = find_equilibria(
                perturbed, solver_config, continuum_config
            )
            records.append(
                TrialRecord(
                    trial=t,
                    seed=trial_spec.seed,
                    epsilon=spec.epsilon,
                    n_equilibria=len(report.equilibria),
                    all_regular=report.all_regular,
                    index_sum=report.index_sum,
                    finite=report.finite_flag,
                )
            )
        except Exception as exc:  # noqa: BLE001 - per-trial isolation is the contract
            records.append(
                TrialRecord(
                    trial=t,
                    seed=trial_spec.seed,
                    epsilon=spec.epsilon,
                    n_equilibria=0,
                    all_regular=False,
                    index_sum=0,
                    finite=False,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return GenericityResult(tuple(records))
