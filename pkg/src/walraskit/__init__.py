"""walraskit: excess-demand analysis for pure-exchange economies.

Prices live on the open unit simplex (equivalently the positive part of the
unit sphere); economies of Cobb-Douglas consumers induce aggregate
excess-demand fields tangent to the price sphere.  The package locates and
classifies the Walrasian equilibria of such fields, decomposes arbitrary
tangent fields into strictly positive combinations of canonical consumer
demands (and realises them as economies), runs seeded perturbation
experiments on economies with continua of equilibria, and checks sampled
demand data against the Strong Axiom of Revealed Preference.
"""

from .consumers import (
    Consumer,
    Economy,
    aed,
    aed_jacobian,
    demand,
    excess_demand,
    indirect_utility,
    wealth,
)
from .decomposition import (
    CanonicalFamily,
    DecompositionWitness,
    GridTooCoarseError,
    PositiveSpanningError,
    basis_excess_demands,
    decompose_at,
    kernel_weights,
    positive_kernel,
    realize_economy,
)
from .econfile import (
    EconomyFormatError,
    load_dataset,
    load_economy,
    save_dataset,
    save_economy,
)
from .equilibrium import (
    ContinuumConfig,
    ContinuumReport,
    Equilibrium,
    EquilibriumReport,
    SolverConfig,
    classify,
    continuum_detector,
    find_equilibria,
    index_sum_check,
    multiplicity_estimate,
)
from .fields import (
    JacobianConsistencyError,
    TangentField,
    chart_field,
    chart_jacobian,
    economy_field,
)
from .genericity import (
    GenericityResult,
    PerturbationSpec,
    build_continuum_economy,
    genericity_experiment,
    perturb,
)
from .geometry import (
    ChartPoint,
    PricePoint,
    TangentVector,
    boundary_margin,
    chart_embed,
    chart_project,
    simplex_point,
    simplex_to_sphere,
    sphere_point,
    sphere_to_simplex,
    tangent_project,
)
from .revealed import (
    AuditReport,
    ObservationDataset,
    SarpResult,
    sample_demand,
    sarp_check,
    scaled_field_audit,
)
from .scales import (
    BumpScale,
    ConstantScale,
    KernelSampledScale,
    PolynomialScale,
    SampledScale,
    scale_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BumpScale",
    "CanonicalFamily",
    "ChartPoint",
    "ConstantScale",
    "Consumer",
    "ContinuumConfig",
    "ContinuumReport",
    "DecompositionWitness",
    "Economy",
    "EconomyFormatError",
    "Equilibrium",
    "EquilibriumReport",
    "GenericityResult",
    "GridTooCoarseError",
    "JacobianConsistencyError",
    "KernelSampledScale",
    "ObservationDataset",
    "PerturbationSpec",
    "PolynomialScale",
    "PositiveSpanningError",
    "PricePoint",
    "SampledScale",
    "SarpResult",
    "SolverConfig",
    "TangentField",
    "TangentVector",
    "aed",
    "aed_jacobian",
    "basis_excess_demands",
    "boundary_margin",
    "build_continuum_economy",
    "chart_embed",
    "chart_field",
    "chart_jacobian",
    "chart_project",
    "classify",
    "continuum_detector",
    "decompose_at",
    "demand",
    "economy_field",
    "excess_demand",
    "find_equilibria",
    "genericity_experiment",
    "index_sum_check",
    "indirect_utility",
    "kernel_weights",
    "load_dataset",
    "load_economy",
    "multiplicity_estimate",
    "perturb",
    "positive_kernel",
    "realize_economy",
    "sample_demand",
    "sarp_check",
    "save_dataset",
    "save_economy",
    "scale_from_dict",
    "scaled_field_audit",
    "simplex_point",
    "simplex_to_sphere",
    "sphere_point",
    "sphere_to_simplex",
    "tangent_project",
    "wealth",
]
