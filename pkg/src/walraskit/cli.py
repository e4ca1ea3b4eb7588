"""Command-line interface.

Subcommands: solve, decompose, realize, perturb, experiment, sarp, audit.
Each reads an input file, runs the corresponding analysis, and writes a
human-readable ``report.txt`` plus command-specific CSV artifacts into the
output directory.  Runs are deterministic given the same inputs and seed
(the default seed is the documented constant 1729).

Exit status: 0 on success, 1 on input errors, 2 on an internal assertion
failure (for example a positive-spanning breakdown, which would contradict
the decomposition construction).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .consumers import aed
from .decomposition import (
    CanonicalFamily,
    PositiveSpanningError,
    decompose_at,
    realize_economy,
)
from .econfile import (
    EconomyFormatError,
    load_dataset,
    load_economy,
    save_economy,
    write_equilibria_csv,
    write_experiment_csv,
    write_witness_csv,
)
from .equilibrium import SolverConfig, find_equilibria
from .fields import economy_field
from .genericity import PerturbationSpec, build_continuum_economy, genericity_experiment, perturb
from .geometry import simplex_point
from .revealed import scaled_field_audit, sarp_check
from .scales import ConstantScale

DEFAULT_SEED = 1729
FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return FLOAT_FMT % float(x)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        grid_density=args.grid,
        newton_tol=args.tol,
        boundary_margin_min=args.margin,
    )


def _write_report(out_dir: Path, lines: list[str]) -> None:
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n")


def _report_equilibria(report, lines: list[str]) -> None:
    lines.append(f"equilibria found: {len(report.equilibria)}")
    for eq in report.equilibria:
        price = ", ".join(_fmt(v) for v in eq.price.coords)
        mult = "-" if eq.multiplicity is None else str(eq.multiplicity)
        lines.append(
            f"  p = ({price})  residual = {_fmt(eq.residual)}  "
            f"{eq.regularity}  index = {eq.index:+d}  multiplicity = {mult}"
        )
    lines.append(f"index sum: {report.index_sum:+d}")
    lines.append(f"finite equilibrium set: {'yes' if report.finite_flag else 'NO (continuum suspected)'}")
    if report.continuum.fired and report.continuum.interval is not None:
        lo, hi = report.continuum.interval
        if np.isscalar(lo):
            lines.append(f"continuum witness interval: [{_fmt(lo)}, {_fmt(hi)}]")
        else:
            lines.append(
                "continuum witness box: "
                f"[{', '.join(_fmt(v) for v in lo)}] .. [{', '.join(_fmt(v) for v in hi)}]"
            )
    s = report.stats
    lines.append(
        f"solver: {s.starts} starts, {s.converged} converged, {s.stalled} stalled, "
        f"{s.exhausted} exhausted, {s.newton_iterations} Newton iterations, "
        f"{s.dedup_merges} dedup merges"
    )


def _cmd_solve(args, out_dir: Path) -> int:
    economy = load_economy(args.input)
    report = find_equilibria(economy, _solver_config(args), k_max=args.k_max)
    write_equilibria_csv(out_dir / "equilibria.csv", report, economy.goods)
    lines = [f"solve: {args.input}", f"goods: {economy.goods}, consumers: {len(economy.consumers)}"]
    _report_equilibria(report, lines)
    _write_report(out_dir, lines)
    return 0


def _decomposition_grid(goods: int, n: int, seed: int):
    if goods == 2:
        xs = np.linspace(0.01, 0.99, n)
        return [simplex_point([x, 1.0 - x]) for x in xs]
    rng = np.random.default_rng(seed)
    return [simplex_point(rng.dirichlet(np.ones(goods))) for _ in range(n)]


def _cmd_decompose(args, out_dir: Path) -> int:
    economy = load_economy(args.input)
    family = CanonicalFamily.symmetric(economy.goods)
    grid = _decomposition_grid(economy.goods, args.grid, args.seed)
    witnesses = [decompose_at(family, aed(economy, p)) for p in grid]
    write_witness_csv(out_dir / "witness.csv", witnesses)
    worst = max(w.residual for w in witnesses)
    floor = min(w.mu.min() for w in witnesses)
    _write_report(
        out_dir,
        [
            f"decompose: {args.input}",
            f"grid points: {len(grid)}",
            f"max reconstruction residual: {_fmt(worst)}",
            f"smallest coefficient: {_fmt(floor)}",
        ],
    )
    return 0


def _cmd_realize(args, out_dir: Path) -> int:
    lines = []
    if args.continuum is not None:
        a, b = args.continuum
        economy = build_continuum_economy((a, b), grid=args.grid)
        lines.append(f"realize: continuum field on [{_fmt(a)}, {_fmt(b)}]")
    else:
        base = load_economy(args.input)
        target_field = economy_field(base)
        family = CanonicalFamily.symmetric(base.goods)
        grid = _decomposition_grid(base.goods, args.grid, args.seed)
        economy = realize_economy(family, target_field, grid)
        realized = economy_field(economy)
        grid_chart = np.array([p.simplex_coords()[:-1] for p in grid])
        mismatch = np.abs(
            realized.chart_values(grid_chart) - target_field.chart_values(grid_chart)
        ).max()
        lines.append(f"realize: aggregate excess demand of {args.input}")
        lines.append(f"max grid-point mismatch: {_fmt(float(mismatch))}")
    save_economy(out_dir / "realized_economy.yaml", economy)
    lines.insert(1, f"grid points: {args.grid}")
    lines.append("wrote realized_economy.yaml")
    _write_report(out_dir, lines)
    return 0


def _perturbation_spec(args) -> PerturbationSpec:
    basis, degree, terms = "random_fourier", 3, 5
    if args.basis:
        parts = args.basis.split(":")
        basis = {"tilt": "linear_tilt", "poly": "polynomial", "fourier": "random_fourier"}.get(
            parts[0], parts[0]
        )
        if len(parts) > 1:
            if basis == "polynomial":
                degree = int(parts[1])
            else:
                terms = int(parts[1])
    return PerturbationSpec(
        epsilon=args.epsilon, basis=basis, degree=degree, terms=terms, seed=args.seed
    )


def _cmd_perturb(args, out_dir: Path) -> int:
    economy = load_economy(args.input)
    spec = _perturbation_spec(args)
    field = perturb(economy, spec)
    report = find_equilibria(field, _solver_config(args))
    write_equilibria_csv(out_dir / "equilibria.csv", report, economy.goods)
    lines = [
        f"perturb: {args.input}",
        f"basis: {spec.basis}, epsilon: {_fmt(spec.epsilon)}, seed: {spec.seed}",
    ]
    _report_equilibria(report, lines)
    _write_report(out_dir, lines)
    return 0


def _cmd_experiment(args, out_dir: Path) -> int:
    economy = load_economy(args.input)
    spec = _perturbation_spec(args)
    result = genericity_experiment(economy, spec, args.trials, _solver_config(args))
    write_experiment_csv(out_dir / "experiment.csv", result)
    errors = [r for r in result.records if r.error is not None]
    lines = [
        f"experiment: {args.input}",
        f"trials: {result.trials}, basis: {spec.basis}, "
        f"epsilon: {_fmt(spec.epsilon)}, base seed: {spec.seed}",
        f"finite_count: {result.finite_count}",
        f"all_regular_count: {result.all_regular_count}",
        f"failed trials: {len(errors)}",
    ]
    baseline = find_equilibria(economy, _solver_config(args))
    lines.append(
        "unperturbed base: "
        + ("continuum detector fired" if baseline.continuum.fired else "finite")
    )
    _write_report(out_dir, lines)
    return 0


def _cmd_sarp(args, out_dir: Path) -> int:
    dataset = load_dataset(args.input)
    result = sarp_check(dataset)
    if result.passed:
        verdict = "SARP: pass"
    else:
        cycle = ", ".join(str(i + 1) for i in result.cycle)
        verdict = f"SARP: violation: cycle ({cycle})"
    _write_report(
        out_dir,
        [f"sarp: {args.input}", f"observations: {dataset.size}", verdict],
    )
    print(verdict)
    return 0


def _cmd_audit(args, out_dir: Path) -> int:
    economy = load_economy(args.input)
    rng = np.random.default_rng(args.seed)
    prices = [
        simplex_point(rng.dirichlet(np.ones(economy.goods)))
        for _ in range(args.samples)
    ]
    lines = [f"audit: {args.input}", f"samples per consumer: {args.samples}"]
    all_passed = True
    for k, consumer in enumerate(economy.consumers):
        kind = consumer.scale.to_dict()["type"]
        if isinstance(consumer.scale, ConstantScale):
            lines.append(f"consumer {k}: constant scale, skipped")
            continue
        report = scaled_field_audit(consumer, prices)
        all_passed &= report.passed
        lines.append(
            f"consumer {k}: scale={kind} "
            f"max |p.z| = {_fmt(report.max_walras_violation)}, "
            f"lower-bound violations = {report.lower_bound_violations}, "
            f"nonpositive-scale samples = {list(report.nonpositive_scale_samples)}, "
            f"{'PASS' if report.passed else 'FAIL'}"
        )
    lines.append(f"audit result: {'PASS' if all_passed else 'FAIL'}")
    _write_report(out_dir, lines)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "decompose": _cmd_decompose,
    "realize": _cmd_realize,
    "perturb": _cmd_perturb,
    "experiment": _cmd_experiment,
    "sarp": _cmd_sarp,
    "audit": _cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walraskit",
        description="Analyse excess-demand fields of pure-exchange economies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, input_required=True):
        p.add_argument("--input", required=input_required, help="input file path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--grid", type=int, default=50, help="grid density / point count")
        p.add_argument("--tol", type=float, default=1e-11, help="solver residual tolerance")
        p.add_argument("--margin", type=float, default=1e-4, help="minimum boundary margin")

    p = sub.add_parser("solve", help="locate and classify all equilibria")
    common(p)
    p.add_argument("--k-max", type=int, default=8, dest="k_max")

    p = sub.add_parser("decompose", help="decompose the economy's excess demand over the canonical family")
    common(p)
    p.set_defaults(grid=101)

    p = sub.add_parser("realize", help="realise a field as a canonical-consumer economy")
    common(p, input_required=False)
    p.set_defaults(grid=201)
    p.add_argument(
        "--continuum",
        nargs=2,
        type=float,
        metavar=("A", "B"),
        help="realise the built-in continuum field on [A, B] instead of an input economy",
    )

    p = sub.add_parser("perturb", help="perturb the excess demand and re-solve")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--basis", default="fourier:5", help="tilt | poly:DEG | fourier:TERMS")

    p = sub.add_parser("experiment", help="seeded perturbation experiment")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--basis", default="fourier:5")

    p = sub.add_parser("sarp", help="check a dataset for revealed-preference cycles")
    common(p)

    p = sub.add_parser("audit", help="audit scaled consumers on sampled prices")
    common(p)
    p.add_argument("--samples", type=int, default=64)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "realize" and args.input is None and args.continuum is None:
        print("realize: provide --input or --continuum", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](args, out_dir)
    except (EconomyFormatError, FileNotFoundError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except PositiveSpanningError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
