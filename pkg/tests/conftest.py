"""Shared test fixtures."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest
import yaml

from wentzell.config import ProblemConfig
from wentzell.fem.assembly import AssembledOperators, BoundaryCoefficient, assemble
from wentzell.fem.mesh import IntervalSpec, Mesh, PolygonSpec, build_mesh
from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.graphlib.mollifier import MollifierKernel
from wentzell.solver.problem import SolveConfig, SourceTerm

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / "config"
PROBLEMS_DIR = CONFIG_DIR / "problems"

UNIT_SQUARE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))


@pytest.fixture(scope="session")
def kernel() -> MollifierKernel:
    return MollifierKernel.bump()


@pytest.fixture
def heaviside() -> PiecewiseGraph:
    """H(t) = 0 for t < 0, 1 for t >= 0."""
    return PiecewiseGraph.from_pieces([(0.0, "0")], "1")


@pytest.fixture
def sign_graph() -> PiecewiseGraph:
    return PiecewiseGraph.from_expression("sign(t)")


@pytest.fixture
def unit_a() -> BoundaryCoefficient:
    return BoundaryCoefficient.parse("1", 1.0)


@pytest.fixture
def half_mesh() -> Mesh:
    """(0, 1) with h = 0.5."""
    return build_mesh(IntervalSpec(0.0, 1.0, 2))


@pytest.fixture
def ops_half(half_mesh: Mesh, unit_a: BoundaryCoefficient) -> AssembledOperators:
    return assemble(half_mesh, unit_a)


@pytest.fixture
def ops_1d(unit_a: BoundaryCoefficient) -> AssembledOperators:
    """(0, 1) with h = 0.125."""
    return assemble(build_mesh(IntervalSpec(0.0, 1.0, 8)), unit_a)


@pytest.fixture
def square_mesh() -> Mesh:
    return build_mesh(PolygonSpec(UNIT_SQUARE, 0.5))


@pytest.fixture
def ops_square(square_mesh: Mesh, unit_a: BoundaryCoefficient) -> AssembledOperators:
    return assemble(square_mesh, unit_a)


@pytest.fixture
def load_problem() -> Callable[[str], ProblemConfig]:
    """Load one of the shipped problem files by stem."""

    def _load(stem: str) -> ProblemConfig:
        return ProblemConfig.load(PROBLEMS_DIR / f"{stem}.yaml", config_dir=CONFIG_DIR)

    return _load


@pytest.fixture
def write_problem(tmp_path: Path) -> Callable[..., Path]:
    """Write a problem mapping (or raw YAML text) to a temporary file."""

    def _write(content: dict[str, Any] | str, name: str = "problem.yaml") -> Path:
        path = tmp_path / name
        text = content if isinstance(content, str) else yaml.safe_dump(content, sort_keys=False)
        path.write_text(text)
        return path

    return _write


@pytest.fixture
def make_config() -> Callable[..., SolveConfig]:
    """SolveConfig on (0, 1) with h = 0.5, zero data and unit Robin coefficient; keywords override."""

    def _make(**overrides: Any) -> SolveConfig:
        params: dict[str, Any] = {
            "domain": IntervalSpec(0.0, 1.0, 2),
            "mesh_level": 0,
            "T": 0.2,
            "dt": 0.1,
            "eps": 0.1,
            "gamma1": PiecewiseGraph.from_expression("0"),
            "gamma2": PiecewiseGraph.from_expression("0"),
            "f1": SourceTerm.parse("0"),
            "f2": SourceTerm.parse("0"),
            "u0": SourceTerm.parse("0"),
            "a_field": BoundaryCoefficient.parse("1", 1.0),
        }
        for key in ("gamma1", "gamma2"):
            if isinstance(overrides.get(key), str):
                overrides[key] = PiecewiseGraph.from_expression(overrides[key])
        for key in ("f1", "f2", "u0", "exact"):
            if isinstance(overrides.get(key), str):
                overrides[key] = SourceTerm.parse(overrides[key])
        params.update(overrides)
        return SolveConfig(**params)

    return _make
