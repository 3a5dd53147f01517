"""Command-line entry point: solve, study, envelope and check."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from wentzell.config import ProblemConfig, RuntimeSettings
from wentzell.errors import (
    AssemblyError,
    CoercivityError,
    ConfigError,
    DomainError,
    GraphError,
    MeshError,
    SolverError,
    WentzellError,
)
from wentzell.logging_config import run_context, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_INPUT_ERRORS = (ConfigError, GraphError, DomainError, MeshError, AssemblyError)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_solve(problem: ProblemConfig, out_dir: Path) -> int:
    """Solve the base level, check the energy inequality and write all result files."""
    from wentzell.fem.assembly import export_operators
    from wentzell.reporting import ResultWriter, format_energy_summary, solve_payload
    from wentzell.solver import build_solve_config, solve
    from wentzell.verify import energy_check

    config = build_solve_config(problem, 0)
    ops = config.assemble()
    traj, ledger = solve(config, ops)
    energy = energy_check(traj, ledger, problem.checks.energy_tol)
    status = EXIT_OK if energy.ok else EXIT_FAILURE

    writer = ResultWriter(out_dir)
    writer.write_trajectory(traj)
    writer.write_ledger(ledger)
    writer.write_vertices(ops.mesh)
    if problem.output.export_operators:
        export_operators(ops, out_dir / "operators")
    writer.write_report("report.json", solve_payload(problem.name, config, traj, ledger, energy, status))
    print(format_energy_summary(energy))
    return status


def cmd_study(problem: ProblemConfig, levels: int, workers: int, out_dir: Path) -> int:
    from wentzell.reporting import ResultWriter, format_study_summary, study_payload
    from wentzell.solver import refine_study

    report = refine_study(problem, levels, workers)
    status = EXIT_OK if report.ok else EXIT_FAILURE
    writer = ResultWriter(out_dir)
    writer.write_report("study.json", study_payload(problem.name, report, status))
    print(format_study_summary(report))
    return status


def envelope_frame(
    graph_spec: object,
    lo: float,
    hi: float,
    samples: int,
    eps_list: Sequence[float],
) -> pd.DataFrame:
    """Columns t, gamma_minus, gamma_plus, env_lo, env_hi and gamma_eps_<eps> per eps."""
    from wentzell.graphlib import MollifierKernel, mollify_many, one_sided_limits, parse_graph

    graph = parse_graph(graph_spec)  # type: ignore[arg-type]
    ts = np.linspace(lo, hi, samples)
    limits = np.array([one_sided_limits(graph, float(s)) for s in ts])
    env_lo, env_hi = graph.envelope_many(ts)
    frame = pd.DataFrame(
        {
            "t": ts,
            "gamma_minus": limits[:, 0],
            "gamma_plus": limits[:, 1],
            "env_lo": env_lo,
            "env_hi": env_hi,
        }
    )
    if eps_list:
        kernel = MollifierKernel.bump()
        for eps in eps_list:
            frame[f"gamma_eps_{eps:g}"] = mollify_many(graph, kernel, eps, ts)
    return frame


def cmd_envelope(
    graph_spec: object,
    lo: float,
    hi: float,
    samples: int,
    eps_list: Sequence[float],
    out_dir: Path | None,
) -> int:
    from wentzell.constants import FLOAT_FORMAT
    from wentzell.reporting import ResultWriter

    frame = envelope_frame(graph_spec, lo, hi, samples, eps_list)
    if out_dir is None:
        frame.to_csv(sys.stdout, float_format=FLOAT_FORMAT, index=False, lineterminator="\n")
    else:
        ResultWriter(out_dir).write_frame("envelope.csv", frame, index=False)
    return EXIT_OK


def check_rows(problem: ProblemConfig) -> list[tuple[str, bool, str, bool]]:
    """(check, ok, detail, informational) rows for the hypotheses of ``problem``."""
    from wentzell.fem.assembly import BoundaryCoefficient, assemble
    from wentzell.constants import CERTIFY_TOL
    from wentzell.fem.coercivity import certify_coercivity
    from wentzell.fem.mesh import build_mesh
    from wentzell.graphlib import (
        check_gradient_growth,
        check_growth,
        check_rauch_condition,
        check_sign_condition,
        parse_graph,
    )
    from wentzell.solver.problem import domain_spec, growth_params
    from wentzell.verify import smallness_check

    checks = problem.checks
    interval = checks.hypothesis_range
    n = checks.hypothesis_samples
    rows: list[tuple[str, bool, str, bool]] = []
    graphs = {}
    growth = dict(zip(("gamma1", "gamma2"), growth_params(problem), strict=True))
    for name, graph_cfg in (("gamma1", problem.reaction.gamma1), ("gamma2", problem.reaction.gamma2)):
        g = parse_graph(graph_cfg.graph_spec())
        graphs[name] = g
        params = growth[name]
        if params is not None:
            report = check_growth(g, params, interval, n)
            rows.append(
                (
                    f"{report.hypothesis.replace('gamma', name)}",
                    report.ok,
                    f"worst ratio {report.worst_ratio:.6g} at t={report.worst_t:.6g}",
                    False,
                )
            )
            if params.d is not None:
                sign = check_sign_condition(g, params.d, interval, n)
                rows.append(
                    (
                        f"{sign.hypothesis} ({name})",
                        sign.ok,
                        f"worst excess {sign.worst_excess:.6g} at t={sign.worst_t:.6g}",
                        False,
                    )
                )
        rauch = check_rauch_condition(g, interval, n)
        rows.append((f"{rauch.hypothesis} ({name})", rauch.ok, f"radius {rauch.radius:.6g}", True))

    a_field = BoundaryCoefficient.parse(problem.boundary.a, problem.boundary.a0)
    ops = assemble(build_mesh(domain_spec(problem), problem.mesh_level), a_field)
    M = ops.require_coercivity
    samples = checks.coercivity_samples
    gap = certify_coercivity(ops, np.random.default_rng(problem.seed), samples)
    rows.append(
        (
            "coercivity",
            gap >= -CERTIFY_TOL * max(1.0, M),
            f"M={M:.6g}; min Rayleigh quotient - M = {gap:.3g} over {samples} random vectors",
            False,
        )
    )

    g1, g2 = growth["gamma1"], growth["gamma2"]
    if g1 is not None and g2 is not None:
        grad = check_gradient_growth(graphs["gamma1"], graphs["gamma2"], 2.0 * (g1.c + g2.c), interval)
        rows.append((grad.hypothesis, grad.ok, f"worst ratio {grad.worst_ratio:.6g}", True))
        verdict = smallness_check(g1.theta, g2.theta, g1.c, g2.c, M)
        rows.append(
            (
                f"smallness (case {verdict.case})",
                verdict.ok,
                f"{verdict.condition}; margin {verdict.margin:.6g}; M={M:.6g}",
                False,
            )
        )
    return rows


def cmd_check(problem: ProblemConfig) -> int:
    from wentzell.reporting import format_verdict_table

    rows = check_rows(problem)
    table = [(name + (" [info]" if info else ""), ok, detail) for name, ok, detail, info in rows]
    print(format_verdict_table(table, title=f"Hypotheses for {problem.name}"))
    failed = [name for name, ok, _, info in rows if not ok and not info]
    for name in failed:
        logger.warning("Check failed: %s", name)
    return EXIT_FAILURE if failed else EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _eps_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid eps list {text!r}") from exc
    if any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError("eps values must be positive")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", help="Log level override (DEBUG, INFO, WARNING, ERROR)")
    common.add_argument("--log-format", choices=["json", "text"], help="Log format override")

    parser = argparse.ArgumentParser(
        prog="wentzell",
        description="Heat equation with nonmonotone dynamic boundary conditions: solver and checks",
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    solve_parser = subparsers.add_parser("solve", parents=[common], help="Solve one problem")
    solve_parser.add_argument("--config", type=Path, required=True, help="Problem YAML file")
    solve_parser.add_argument("--out-dir", type=Path, help="Output directory")
    solve_parser.add_argument("--seed", type=int, help="Seed override")

    study_parser = subparsers.add_parser("study", parents=[common], help="Run a refinement study")
    study_parser.add_argument("--config", type=Path, required=True, help="Problem YAML file")
    study_parser.add_argument("--levels", type=int, help="Number of levels (at least 2)")
    study_parser.add_argument("--workers", type=int, help="Worker processes for the levels")
    study_parser.add_argument("--out-dir", type=Path, help="Output directory")
    study_parser.add_argument("--seed", type=int, help="Seed override")

    env_parser = subparsers.add_parser("envelope", parents=[common], help="Tabulate a graph envelope")
    source = env_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", help="Graph spec: expression in t or YAML mapping")
    source.add_argument("--config", type=Path, help="Problem YAML file to read the graph from")
    env_parser.add_argument("--which", choices=["gamma1", "gamma2"], default="gamma2")
    env_parser.add_argument("--range", nargs=2, type=float, default=[-1.0, 1.0], metavar=("LO", "HI"))
    env_parser.add_argument("--samples", type=int, default=201)
    env_parser.add_argument("--eps-list", type=_eps_list, default=[], help="Comma-separated eps values")
    env_parser.add_argument("--out-dir", type=Path, help="Write envelope.csv here instead of stdout")

    check_parser = subparsers.add_parser("check", parents=[common], help="Check hypotheses without solving")
    check_parser.add_argument("--config", type=Path, required=True, help="Problem YAML file")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    if args.command == "study" and args.levels is not None and args.levels < 2:
        parser.error(f"--levels must be at least 2, got {args.levels}")
    if args.command == "study" and args.workers is not None and args.workers < 1:
        parser.error(f"--workers must be at least 1, got {args.workers}")
    if args.command == "envelope":
        lo, hi = args.range
        if not lo < hi:
            parser.error(f"empty range [{lo}, {hi}]")
        if args.samples < 2:
            parser.error(f"--samples must be at least 2, got {args.samples}")

    settings = RuntimeSettings()
    try:
        problem = ProblemConfig.load(args.config) if args.config is not None else ProblemConfig()
        if getattr(args, "seed", None) is not None:
            problem = problem.model_copy(update={"seed": args.seed})
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(
        level=args.log_level or settings.log_level or problem.logging.level,
        log_format=args.log_format or problem.logging.format,
        log_dir=problem.logging.dir,
    )
    out_dir = Path(
        getattr(args, "out_dir", None) or settings.out_dir or problem.output.out_dir
    )

    try:
        with run_context(problem=problem.name, command=args.command):
            return _dispatch(args, problem, out_dir)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except yaml.YAMLError as exc:
        print(f"error: cannot parse graph spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, CoercivityError) as exc:
        logger.error("Run failed: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except WentzellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def _dispatch(args: argparse.Namespace, problem: ProblemConfig, out_dir: Path) -> int:
    match args.command:
        case "solve":
            return cmd_solve(problem, out_dir)
        case "study":
            levels = args.levels if args.levels is not None else problem.study.levels
            workers = args.workers if args.workers is not None else problem.study.workers
            return cmd_study(problem, levels, workers, out_dir)
        case "envelope":
            if args.graph is not None:
                spec = yaml.safe_load(args.graph)
            else:
                spec = getattr(problem.reaction, args.which).graph_spec()
            lo, hi = args.range
            return cmd_envelope(spec, lo, hi, args.samples, args.eps_list, args.out_dir)
        case "check":
            return cmd_check(problem)
    return EXIT_USAGE


def cli_entry() -> None:
    """CLI entry point for `wentzell` command."""
    sys.exit(main())
