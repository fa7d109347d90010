import random

import pytest

from cddkit import data_path, load_problem
from cddkit.designspace import DesignProblem, DesignVariable, ObjectiveConstraint
from cddkit.surface import Interval, QuadraticResponseSurface


def load_bundled(name: str) -> DesignProblem:
    return load_problem(data_path(name).read_text())


@pytest.fixture
def emissions():
    return load_bundled("emissions.json")


@pytest.fixture
def adas():
    return load_bundled("adas.json")


@pytest.fixture
def adas_tall():
    return load_bundled("adas_tall.json")


def random_surface(rng: random.Random, dim: int, name: str = "z") -> QuadraticResponseSurface:
    return QuadraticResponseSurface(
        name=name,
        unit="",
        beta0=rng.uniform(-2.0, 2.0),
        linear=tuple(rng.uniform(-2.0, 2.0) for _ in range(dim)),
        quadratic=tuple(rng.uniform(-1.0, 1.0) for _ in range(dim)),
    )


def random_problem(rng: random.Random, dim: int | None = None) -> DesignProblem:
    """A randomized problem whose seed is strictly feasible by construction."""
    n = dim if dim is not None else rng.randint(1, 3)
    variables = []
    seed = []
    for j in range(n):
        lo = rng.uniform(-2.0, 1.0)
        width = rng.uniform(0.8, 2.0)
        variables.append(DesignVariable(f"x{j}", "", Interval(lo, lo + width)))
        seed.append(lo + width * rng.uniform(0.15, 0.85))
    surfaces = [random_surface(rng, n, f"z{i}") for i in range(rng.randint(1, 3))]
    constraints = [
        ObjectiveConstraint(s.name, s.evaluate(seed) + rng.uniform(0.5, 2.5)) for s in surfaces
    ]
    return DesignProblem(
        variables=tuple(variables),
        surfaces=tuple(surfaces),
        constraints=tuple(constraints),
        seed=tuple(seed),
        name="random",
    )
